#include "fcnet/atlas.hpp"

#include <fstream>
#include <set>

#include "fcnet/io.hpp"

namespace fcnet {

std::string group_name(Group g) {
  switch (g) {
    case Group::AD: return "AD";
    case Group::MCI: return "MCI";
    case Group::EMCI: return "EMCI";
    case Group::LMCI: return "LMCI";
    case Group::CN: return "CN";
    case Group::SYNTH_A: return "SYNTH_A";
    case Group::SYNTH_B: return "SYNTH_B";
  }
  fail(ErrorCode::InvalidArgument, "unknown group");
}

Group group_from_name(const std::string& name) {
  static const std::map<std::string, Group> table = {
      {"AD", Group::AD},           {"MCI", Group::MCI},
      {"EMCI", Group::EMCI},       {"LMCI", Group::LMCI},
      {"CN", Group::CN},           {"SYNTH_A", Group::SYNTH_A},
      {"SYNTH_B", Group::SYNTH_B},
  };
  auto it = table.find(name);
  require(it != table.end(), ErrorCode::InvalidArgument,
          "unknown group name: " + name);
  return it->second;
}

RoiAtlas::RoiAtlas(std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  require(!labels_.empty(), ErrorCode::InvalidArgument, "atlas: no labels");
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    require(!l.empty(), ErrorCode::InvalidArgument, "atlas: empty label");
    require(seen.insert(l).second, ErrorCode::InvalidArgument,
            "atlas: duplicate label: " + l);
  }
}

const std::string& RoiAtlas::label(int index_1based) const {
  require(index_1based >= 1 && index_1based <= size(),
          ErrorCode::InvalidArgument, "atlas: index out of range");
  return labels_[static_cast<std::size_t>(index_1based - 1)];
}

RoiAtlas builtin_atlas() {
  static const char* kLabels[116] = {
      "Precentral_L", "Precentral_R", "Frontal_Sup_L", "Frontal_Sup_R",
      "Frontal_Sup_Orb_L", "Frontal_Sup_Orb_R", "Frontal_Mid_L",
      "Frontal_Mid_R", "Frontal_Mid_Orb_L", "Frontal_Mid_Orb_R",
      "Frontal_Inf_Oper_L", "Frontal_Inf_Oper_R", "Frontal_Inf_Tri_L",
      "Frontal_Inf_Tri_R", "Frontal_Inf_Orb_L", "Frontal_Inf_Orb_R",
      "Rolandic_Oper_L", "Rolandic_Oper_R", "Supp_Motor_L", "Supp_Motor_R",
      "Olfactory_L", "Olfactory_R", "Frontal_Sup_Med_L", "Frontal_Sup_Med_R",
      "Frontal_Med_Orb_L", "Frontal_Med_Orb_R", "Rectus_L", "Rectus_R",
      "Insula_L", "Insula_R", "Cingulum_Ant_L", "Cingulum_Ant_R",
      "Cingulum_Mid_L", "Cingulum_Mid_R", "Cingulum_Post_L",
      "Cingulum_Post_R", "Hippocampus_L", "Hippocampus_R", "ParaHippo_L",
      "ParaHippo_R", "Amygdala_L", "Amygdala_R", "Calcarine_L", "Calcarine_R",
      "Cuneus_L", "Cuneus_R", "Lingual_L", "Lingual_R", "Occipital_Sup_L",
      "Occipical_Sup_R", "Occipital_Mid_L", "Occipical_Mid_R",
      "Occipital_Inf_L", "Occipital_Inf_R", "Fusiform_L", "Fusiform_R",
      "Postcentral_L", "Postcentral_R", "Parietal_Sup_L", "Parietal_Sup_R",
      "Parietal_Inf_L", "Parietal_Inf_R", "SupraMarginal_L", "SupraMarginal_R",
      "Angular_L", "Angular_R", "Precuneus_L", "Precuneus_R",
      "Paracentral_Lob_L", "Paracentral_Lob_R", "Caudate_L", "Caudate_R",
      "Putamen_L", "Putamen_R", "Pallidum_L", "Pallidum_R", "Thalamus_L",
      "Thalamus_R", "Heschl_L", "Heschl_R", "Temporal_Sup_L", "Temporal_Sup_R",
      "Templ_Pole_Sup_L", "Templ_Pole_Sup_R", "Temporal_Mid_L",
      "Temporal_Mid_R", "Templ_Pole_Mid_L", "Temp_Pole_Mid_R",
      "Temporal_Inf_L", "Temporal_Inf_R", "Cerebelm_Crus1_L",
      "Cerebelm_Crus1_R", "Cerebelm_Crus2_L", "Cerebelm_Crus2_R",
      "Cerebelum_3_L", "Cerebelum_3_R", "Cerebelum_4_5_L", "Cerebelum_4_5_R",
      "Cerebelum_6_L", "Cerebelum_6_R", "Cerebelum_7_L", "Cerebelum_7_R",
      "Cerebelum_8_L", "Cerebelum_8_R", "Cerebelum_9_L", "Cerebelum_9_R",
      "Cerebelum_10_L", "Cerebelum_10_R", "Vermis_1_2", "Vermis_3",
      "Vermis_4_5", "Vermis_6", "Vermis_7", "Vermis_8", "Vermis_9",
      "Vermis_10",
  };
  return RoiAtlas(std::vector<std::string>(kLabels, kLabels + 116));
}

RoiAtlas load_atlas(const std::string& path_or_builtin) {
  if (path_or_builtin == "builtin") return builtin_atlas();
  std::ifstream in(path_or_builtin);
  require(in.good(), ErrorCode::Io, "cannot open atlas: " + path_or_builtin);
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (line.empty()) continue;
    labels.push_back(line);
  }
  require(!labels.empty(), ErrorCode::Io,
          "atlas file has no labels: " + path_or_builtin);
  return RoiAtlas(std::move(labels));
}

void validate_recording(const BoldRecording& rec, const RoiAtlas& atlas) {
  require(rec.r_count() == atlas.size(), ErrorCode::DimensionMismatch,
          "recording has " + std::to_string(rec.r_count()) +
              " channels, atlas has " + std::to_string(atlas.size()));
  require(rec.t_count() >= 8, ErrorCode::InvalidArgument,
          "recording needs at least 8 timepoints");
  require(all_finite(rec.signal), ErrorCode::NonFinite,
          "recording contains non-finite values");
}

BoldRecording ingest_bold(const std::filesystem::path& csv_path,
                          const RoiAtlas& atlas, const std::string& subject_id,
                          Group group) {
  std::vector<std::string> header;
  Matrix m = read_csv(csv_path, true, &header);
  require(static_cast<int>(header.size()) == atlas.size(),
          ErrorCode::DimensionMismatch,
          "bold csv has " + std::to_string(header.size()) +
              " columns, atlas has " + std::to_string(atlas.size()));
  for (int j = 0; j < atlas.size(); ++j) {
    require(header[static_cast<std::size_t>(j)] == atlas.label(j + 1),
            ErrorCode::InvalidArgument,
            "bold csv header mismatch at column " + std::to_string(j + 1) +
                ": got '" + header[static_cast<std::size_t>(j)] +
                "', expected '" + atlas.label(j + 1) + "'");
  }
  BoldRecording rec{subject_id, group, std::move(m)};
  validate_recording(rec, atlas);
  return rec;
}

void export_bold(const BoldRecording& rec, const RoiAtlas& atlas,
                 const std::filesystem::path& csv_path) {
  validate_recording(rec, atlas);
  write_csv(csv_path, rec.signal, atlas.labels());
}

BoldRecording standardize(const BoldRecording& rec, const RoiAtlas* atlas) {
  const Matrix& x = rec.signal;
  int t = rec.t_count();
  require(t >= 2, ErrorCode::InvalidArgument,
          "standardize needs at least 2 timepoints");
  Matrix out(x.rows(), x.cols());
  for (int j = 0; j < rec.r_count(); ++j) {
    double mean = x.col(j).mean();
    double ss = (x.col(j).array() - mean).square().sum();
    double sd = std::sqrt(ss / static_cast<double>(t - 1));
    if (sd <= 0.0) {
      std::string name = atlas ? atlas->label(j + 1)
                               : "channel " + std::to_string(j + 1);
      fail(ErrorCode::InvalidArgument, "degenerate channel (zero variance): " + name);
    }
    out.col(j) = ((x.col(j).array() - mean) / sd).matrix();
  }
  return BoldRecording{rec.subject_id, rec.group, std::move(out)};
}

}  // namespace fcnet
