#pragma once

#include <cstdint>
#include <string>

#include "voxpaf/decoder.hpp"
#include "voxpaf/unproject.hpp"
#include "voxpaf/volume.hpp"

namespace voxpaf {

// Everything the pipeline needs besides its inputs. JSON round-trips are
// byte-identical: dump -> load -> dump reproduces the same text.
struct PipelineConfig {
  VoxelGrid grid{{0.1, 0.1, 0.0}, {64, 64, 32}, 0.075};
  double sigma_voxels = 1.0;        // heatmap Gaussian width
  double limb_radius_voxels = 1.0;  // vectormap tube radius
  double stride = 16.0;             // image pixels per feature-map texel
  UnprojectOptions unprojection;
  DecoderParams decoder;
  std::uint64_t seed = 0;

  void validate() const;
};

PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::string& path);
std::string config_to_json(const PipelineConfig& config);
void save_config(const PipelineConfig& config, const std::string& path);

}  // namespace voxpaf
