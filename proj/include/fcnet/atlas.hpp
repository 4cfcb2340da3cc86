#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fcnet/common.hpp"

namespace fcnet {

enum class Group { AD, MCI, EMCI, LMCI, CN, SYNTH_A, SYNTH_B };

std::string group_name(Group g);
Group group_from_name(const std::string& name);

// Ordered ROI labels; indices are 1-based to match the atlas numbering.
class RoiAtlas {
 public:
  explicit RoiAtlas(std::vector<std::string> labels);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::string& label(int index_1based) const;
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
};

// The 116-entry AAL template. Entries 25/26 are Frontal_Med_Orb_L/R; every
// other quirk of the published list is kept as-is.
RoiAtlas builtin_atlas();

// One label per line. The token "builtin" yields builtin_atlas().
RoiAtlas load_atlas(const std::string& path_or_builtin);

struct BoldRecording {
  std::string subject_id;
  Group group = Group::SYNTH_A;
  Matrix signal;  // T x R

  int t_count() const { return static_cast<int>(signal.rows()); }
  int r_count() const { return static_cast<int>(signal.cols()); }
};

void validate_recording(const BoldRecording& rec, const RoiAtlas& atlas);

BoldRecording ingest_bold(const std::filesystem::path& csv_path,
                          const RoiAtlas& atlas, const std::string& subject_id,
                          Group group);
void export_bold(const BoldRecording& rec, const RoiAtlas& atlas,
                 const std::filesystem::path& csv_path);

// Column-wise z-score with sample (n-1) sd. Atlas is used only to name the
// offending channel in the degenerate-channel error.
BoldRecording standardize(const BoldRecording& rec,
                          const RoiAtlas* atlas = nullptr);

struct CohortSpec {
  std::map<Group, int> group_sizes;
  int r_count = 116;
  int t_count = 200;
  int n_blocks = 4;
  std::vector<int> block_assignments;  // empty -> contiguous default
  double noise_sd = 0.5;
  std::uint64_t seed = 0;
};

// Block-shared sinusoid sources plus iid Gaussian noise. The g-th group in
// enum order rotates the block id of every odd-index channel by g, so any two
// groups differ by a known re-wiring of half the channels.
std::vector<BoldRecording> synth_cohort(const CohortSpec& spec);

}  // namespace fcnet
