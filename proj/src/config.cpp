#include "voxpaf/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace voxpaf {

namespace {

using ordered_json = nlohmann::ordered_json;

}  // namespace

void PipelineConfig::validate() const {
  grid.validate();
  if (!(sigma_voxels > 0.0)) throw Error(ErrorCode::invalid_argument, "config: sigma_voxels must be positive");
  if (!(limb_radius_voxels > 0.0))
    throw Error(ErrorCode::invalid_argument, "config: limb_radius_voxels must be positive");
  if (!(stride > 0.0)) throw Error(ErrorCode::invalid_argument, "config: stride must be positive");
  if (unprojection.threads < 0) throw Error(ErrorCode::invalid_argument, "config: threads must be >= 0");
  if (decoder.peaks.radius < 1) throw Error(ErrorCode::invalid_argument, "config: peak radius must be >= 1");
  if (decoder.paf_samples < 2) throw Error(ErrorCode::invalid_argument, "config: paf_samples must be >= 2");
  if (decoder.min_joints < 1) throw Error(ErrorCode::invalid_argument, "config: min_joints must be >= 1");
}

PipelineConfig parse_config(const std::string& json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::parse, std::string("config: invalid JSON: ") + e.what());
  }

  PipelineConfig c;
  try {
    const auto& grid = doc.at("grid");
    c.grid.origin = {grid.at("origin").at(0).get<double>(), grid.at("origin").at(1).get<double>(),
                     grid.at("origin").at(2).get<double>()};
    c.grid.dims = {grid.at("dims").at(0).get<int>(), grid.at("dims").at(1).get<int>(),
                   grid.at("dims").at(2).get<int>()};
    c.grid.voxel_size = grid.at("voxel_size").get<double>();
    c.sigma_voxels = doc.at("sigma_voxels").get<double>();
    c.limb_radius_voxels = doc.at("limb_radius_voxels").get<double>();
    c.stride = doc.at("stride").get<double>();
    const auto& unproj = doc.at("unprojection");
    c.unprojection.visibility_normalized = unproj.at("visibility_normalized").get<bool>();
    c.unprojection.threads = unproj.at("threads").get<int>();
    const auto& dec = doc.at("decoder");
    c.decoder.peaks.radius = dec.at("peak_radius").get<int>();
    c.decoder.peaks.threshold = dec.at("peak_threshold").get<double>();
    c.decoder.peaks.refine = dec.at("refine").get<bool>();
    c.decoder.paf_samples = dec.at("paf_samples").get<int>();
    c.decoder.paf_threshold = dec.at("paf_threshold").get<double>();
    c.decoder.min_joints = dec.at("min_joints").get<int>();
    c.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::parse, std::string("config: missing or malformed field: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const PipelineConfig& config) {
  ordered_json doc;
  doc["grid"]["origin"] = {config.grid.origin.x, config.grid.origin.y, config.grid.origin.z};
  doc["grid"]["dims"] = {config.grid.dims[0], config.grid.dims[1], config.grid.dims[2]};
  doc["grid"]["voxel_size"] = config.grid.voxel_size;
  doc["sigma_voxels"] = config.sigma_voxels;
  doc["limb_radius_voxels"] = config.limb_radius_voxels;
  doc["stride"] = config.stride;
  doc["unprojection"]["visibility_normalized"] = config.unprojection.visibility_normalized;
  doc["unprojection"]["threads"] = config.unprojection.threads;
  doc["decoder"]["peak_radius"] = config.decoder.peaks.radius;
  doc["decoder"]["peak_threshold"] = config.decoder.peaks.threshold;
  doc["decoder"]["refine"] = config.decoder.peaks.refine;
  doc["decoder"]["paf_samples"] = config.decoder.paf_samples;
  doc["decoder"]["paf_threshold"] = config.decoder.paf_threshold;
  doc["decoder"]["min_joints"] = config.decoder.min_joints;
  doc["seed"] = config.seed;
  return doc.dump(2) + "\n";
}

void save_config(const PipelineConfig& config, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "config: cannot write " + path);
  out << config_to_json(config);
  if (!out) throw Error(ErrorCode::io, "config: write failed for " + path);
}

}  // namespace voxpaf
