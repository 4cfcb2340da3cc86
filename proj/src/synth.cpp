#include "fcnet/atlas.hpp"

#include <cstdio>

namespace fcnet {

static std::vector<int> default_blocks(int r, int n_blocks) {
  std::vector<int> blocks(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    blocks[static_cast<std::size_t>(i)] =
        static_cast<int>(static_cast<long long>(i) * n_blocks / r);
  }
  return blocks;
}

static void validate_spec(const CohortSpec& spec) {
  require(!spec.group_sizes.empty(), ErrorCode::InvalidArgument,
          "cohort: no groups");
  for (const auto& [g, n] : spec.group_sizes) {
    require(n > 0, ErrorCode::InvalidArgument,
            "cohort: group " + group_name(g) + " has non-positive size");
  }
  require(spec.r_count >= 2, ErrorCode::InvalidArgument,
          "cohort: r_count must be >= 2");
  require(spec.t_count >= 8, ErrorCode::InvalidArgument,
          "cohort: t_count must be >= 8");
  require(spec.n_blocks >= 2, ErrorCode::InvalidArgument,
          "cohort: n_blocks must be >= 2");
  require(spec.noise_sd > 0.0, ErrorCode::InvalidArgument,
          "cohort: noise_sd must be > 0");
  if (!spec.block_assignments.empty()) {
    require(static_cast<int>(spec.block_assignments.size()) == spec.r_count,
            ErrorCode::DimensionMismatch,
            "cohort: block_assignments length != r_count");
    for (int b : spec.block_assignments) {
      require(b >= 0 && b < spec.n_blocks, ErrorCode::InvalidArgument,
              "cohort: block id out of range");
    }
  }
}

std::vector<BoldRecording> synth_cohort(const CohortSpec& spec) {
  validate_spec(spec);
  std::vector<int> base = spec.block_assignments.empty()
                              ? default_blocks(spec.r_count, spec.n_blocks)
                              : spec.block_assignments;
  Rng root(spec.seed);
  std::vector<BoldRecording> cohort;
  std::uint64_t subject_tag = 0;
  int variant = 0;
  for (const auto& [group, count] : spec.group_sizes) {
    // Variant v re-wires odd-index channels into block (b + v) mod n_blocks.
    std::vector<int> blocks = base;
    for (int i = 1; i < spec.r_count; i += 2) {
      blocks[static_cast<std::size_t>(i)] =
          (blocks[static_cast<std::size_t>(i)] + variant) % spec.n_blocks;
    }
    for (int k = 0; k < count; ++k) {
      Rng rng = root.fork(++subject_tag);
      std::vector<double> freq(static_cast<std::size_t>(spec.n_blocks));
      std::vector<double> phase(static_cast<std::size_t>(spec.n_blocks));
      for (int b = 0; b < spec.n_blocks; ++b) {
        freq[static_cast<std::size_t>(b)] =
            2.0 + 3.0 * b + rng.uniform(-0.3, 0.3);
        phase[static_cast<std::size_t>(b)] = rng.uniform(0.0, 2.0 * M_PI);
      }
      Matrix source(spec.t_count, spec.n_blocks);
      for (int b = 0; b < spec.n_blocks; ++b) {
        for (int t = 0; t < spec.t_count; ++t) {
          source(t, b) = std::sin(2.0 * M_PI * freq[static_cast<std::size_t>(b)] *
                                      static_cast<double>(t) / 100.0 +
                                  phase[static_cast<std::size_t>(b)]);
        }
      }
      Matrix signal(spec.t_count, spec.r_count);
      for (int i = 0; i < spec.r_count; ++i) {
        int b = blocks[static_cast<std::size_t>(i)];
        for (int t = 0; t < spec.t_count; ++t) {
          signal(t, i) = source(t, b) + spec.noise_sd * rng.normal();
        }
      }
      char id[64];
      std::snprintf(id, sizeof(id), "%s_%03d", group_name(group).c_str(), k);
      cohort.push_back(BoldRecording{id, group, std::move(signal)});
    }
    ++variant;
  }
  return cohort;
}

}  // namespace fcnet
