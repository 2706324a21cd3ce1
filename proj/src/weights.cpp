#include "udep/weights.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace udep {

double score_part(const WeightModel& model, const FeatureExtractor& fx,
                  const Sentence& s, const FeaturePart& part) {
  thread_local std::vector<uint32_t> ids;
  ids.clear();
  fx.extract(s, part, &ids);
  return model.score_ids(ids);
}

double score_tree(const WeightModel& model, const FeatureExtractor& fx,
                  const Sentence& s, const DepTree& t) {
  double total = 0;
  for (const auto& part : tree_parts(t)) {
    total += score_part(model, fx, s, part);
  }
  return total;
}

void WeightModel::save(const std::string& path, bool binary) const {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "#weightmodel v1 format=" << (binary ? "bin" : "text")
      << " templates=" << template_version << " bits=" << feature_bits
      << " averaged=" << (averaged_finalized ? 1 : 0) << '\n';
  const auto& w = active();
  if (binary) {
    uint64_t nonzero = 0;
    for (double v : w) {
      if (v != 0.0) ++nonzero;
    }
    out.write(reinterpret_cast<const char*>(&nonzero), sizeof(nonzero));
    for (uint32_t id = 0; id < w.size(); ++id) {
      if (w[id] != 0.0) {
        out.write(reinterpret_cast<const char*>(&id), sizeof(id));
        out.write(reinterpret_cast<const char*>(&w[id]), sizeof(double));
      }
    }
  } else {
    char buf[64];
    for (uint32_t id = 0; id < w.size(); ++id) {
      if (w[id] != 0.0) {
        std::snprintf(buf, sizeof(buf), "%.17g", w[id]);
        out << id << '\t' << buf << '\n';
      }
    }
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

WeightModel WeightModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::string header;
  if (!std::getline(in, header) || header.rfind("#weightmodel v1", 0) != 0) {
    throw std::runtime_error(path + ": not a weightmodel v1 file");
  }
  WeightModel m;
  bool binary = false;
  {
    std::istringstream hs(header);
    std::string tok;
    while (hs >> tok) {
      if (tok.rfind("format=", 0) == 0) binary = tok.substr(7) == "bin";
      if (tok.rfind("templates=", 0) == 0) m.template_version = tok.substr(10);
      if (tok.rfind("bits=", 0) == 0 && std::stoi(tok.substr(5)) != kFeatureBits) {
        throw std::runtime_error(path + ": feature space size mismatch");
      }
    }
  }
  if (m.template_version != WeightModel().template_version) {
    throw std::runtime_error(path + ": feature template version mismatch: " +
                             m.template_version);
  }
  if (binary) {
    uint64_t nonzero = 0;
    in.read(reinterpret_cast<char*>(&nonzero), sizeof(nonzero));
    for (uint64_t i = 0; i < nonzero; ++i) {
      uint32_t id = 0;
      double v = 0;
      in.read(reinterpret_cast<char*>(&id), sizeof(id));
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      if (!in || id >= kFeatureSpace) {
        throw std::runtime_error(path + ": truncated or corrupt binary weights");
      }
      m.weights[id] = v;
    }
  } else {
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      size_t tab = line.find('\t');
      if (tab == std::string::npos) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": malformed weight line");
      }
      uint32_t id = static_cast<uint32_t>(std::stoul(line.substr(0, tab)));
      if (id >= kFeatureSpace) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": feature id out of range");
      }
      m.weights[id] = std::stod(line.substr(tab + 1));
    }
  }
  // A saved model always stores the weights that should be used for scoring.
  m.averaged = m.weights;
  m.averaged_finalized = true;
  return m;
}

}  // namespace udep
