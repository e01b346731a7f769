#include "globalner/crf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "globalner/errors.hpp"
#include "globalner/rng.hpp"

namespace globalner {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

void check_segment(const AssembledInput& input) {
  if (input.local_begin >= input.local_end ||
      input.local_end > input.tokens.size()) {
    throw DataError("assembled input has an empty or invalid local range");
  }
}

std::vector<std::size_t> gold_indices(const CrfModel& model,
                                      const AssembledInput& input,
                                      const std::vector<BioLabel>& gold) {
  if (gold.size() != input.local_length()) {
    throw DataError("gold label count " + std::to_string(gold.size()) +
                    " does not match local length " +
                    std::to_string(input.local_length()));
  }
  std::vector<std::size_t> indices(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    indices[i] = model.label_index(gold[i]);
  }
  return indices;
}

}  // namespace

std::size_t CrfModel::label_index(const BioLabel& label) const {
  std::string text = format_bio_label(label);
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (labels[t] == text) return t;
  }
  throw DataError("label '" + text + "' is not in the model's label set");
}

CrfModel CrfModel::init(std::vector<std::string> labels,
                        std::size_t feature_dim, std::uint64_t seed,
                        double scale) {
  if (labels.empty()) throw DataError("CrfModel: empty label set");
  CrfModel model;
  model.labels = std::move(labels);
  model.feature_dim = feature_dim;
  const std::size_t t = model.labels.size();
  std::mt19937_64 rng(seed);
  auto fill = [&](std::vector<double>& v, std::size_t n) {
    v.resize(n);
    for (double& x : v) x = (2.0 * rand_unit(rng) - 1.0) * scale;
  };
  fill(model.emission, feature_dim * t);
  fill(model.transitions, t * t);
  fill(model.start, t);
  fill(model.end, t);
  return model;
}

std::vector<double> crf_emissions(const CrfModel& model,
                                  const std::vector<std::vector<double>>& features,
                                  std::size_t begin, std::size_t end) {
  const std::size_t t = model.num_labels();
  const std::size_t length = end - begin;
  std::vector<double> em(length * t, 0.0);
  for (std::size_t pos = 0; pos < length; ++pos) {
    const auto& f = features[begin + pos];
    if (f.size() != model.feature_dim) {
      throw DataError("feature dimension mismatch at position " +
                      std::to_string(begin + pos));
    }
    for (std::size_t d = 0; d < model.feature_dim; ++d) {
      double x = f[d];
      if (x == 0.0) continue;
      for (std::size_t k = 0; k < t; ++k) {
        em[pos * t + k] += x * model.emission[d * t + k];
      }
    }
  }
  return em;
}

double crf_log_partition(const CrfModel& model,
                         const std::vector<std::vector<double>>& features,
                         std::size_t begin, std::size_t end) {
  if (begin >= end) throw DataError("crf_log_partition: empty segment");
  const std::size_t t = model.num_labels();
  const std::size_t length = end - begin;
  auto em = crf_emissions(model, features, begin, end);

  std::vector<double> fwd(t), next(t), buf(t);
  for (std::size_t k = 0; k < t; ++k) fwd[k] = model.start[k] + em[k];
  for (std::size_t pos = 1; pos < length; ++pos) {
    for (std::size_t k = 0; k < t; ++k) {
      for (std::size_t j = 0; j < t; ++j) {
        buf[j] = fwd[j] + model.transitions[j * t + k];
      }
      next[k] = log_sum_exp(buf) + em[pos * t + k];
    }
    std::swap(fwd, next);
  }
  for (std::size_t k = 0; k < t; ++k) buf[k] = fwd[k] + model.end[k];
  return log_sum_exp(buf);
}

double crf_path_score(const CrfModel& model,
                      const std::vector<double>& emissions, std::size_t length,
                      const std::vector<std::size_t>& path) {
  const std::size_t t = model.num_labels();
  double score = model.start[path[0]] + emissions[path[0]];
  for (std::size_t pos = 1; pos < length; ++pos) {
    score += model.transitions[path[pos - 1] * t + path[pos]] +
             emissions[pos * t + path[pos]];
  }
  return score + model.end[path[length - 1]];
}

double crf_nll_masked(const CrfModel& model, const AssembledInput& input,
                      const FeatureProvider& provider,
                      const std::vector<BioLabel>& gold) {
  check_segment(input);
  auto features = provider.featurize(input);
  auto gold_ids = gold_indices(model, input, gold);
  auto em = crf_emissions(model, features, input.local_begin, input.local_end);
  double log_z =
      crf_log_partition(model, features, input.local_begin, input.local_end);
  return log_z - crf_path_score(model, em, input.local_length(), gold_ids);
}

void CrfGradient::accumulate(const CrfGradient& other) {
  auto add = [](std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  };
  add(emission, other.emission);
  add(transitions, other.transitions);
  add(start, other.start);
  add(end, other.end);
  loss += other.loss;
}

void CrfGradient::scale(double factor) {
  for (double& x : emission) x *= factor;
  for (double& x : transitions) x *= factor;
  for (double& x : start) x *= factor;
  for (double& x : end) x *= factor;
  loss *= factor;
}

CrfGradient crf_gradient(const CrfModel& model,
                         const std::vector<std::vector<double>>& features,
                         std::size_t begin, std::size_t end,
                         const std::vector<std::size_t>& gold) {
  const std::size_t t = model.num_labels();
  const std::size_t length = end - begin;
  auto em = crf_emissions(model, features, begin, end);

  // Forward and backward tables in log space.
  std::vector<double> fwd(length * t), bwd(length * t), buf(t);
  for (std::size_t k = 0; k < t; ++k) fwd[k] = model.start[k] + em[k];
  for (std::size_t pos = 1; pos < length; ++pos) {
    for (std::size_t k = 0; k < t; ++k) {
      for (std::size_t j = 0; j < t; ++j) {
        buf[j] = fwd[(pos - 1) * t + j] + model.transitions[j * t + k];
      }
      fwd[pos * t + k] = log_sum_exp(buf) + em[pos * t + k];
    }
  }
  for (std::size_t k = 0; k < t; ++k) bwd[(length - 1) * t + k] = model.end[k];
  for (std::size_t pos = length - 1; pos > 0; --pos) {
    for (std::size_t j = 0; j < t; ++j) {
      for (std::size_t k = 0; k < t; ++k) {
        buf[k] = model.transitions[j * t + k] + em[pos * t + k] +
                 bwd[pos * t + k];
      }
      bwd[(pos - 1) * t + j] = log_sum_exp(buf);
    }
  }
  for (std::size_t k = 0; k < t; ++k) buf[k] = fwd[(length - 1) * t + k] + model.end[k];
  double log_z = log_sum_exp(buf);

  CrfGradient grad;
  grad.emission.assign(model.emission.size(), 0.0);
  grad.transitions.assign(model.transitions.size(), 0.0);
  grad.start.assign(t, 0.0);
  grad.end.assign(t, 0.0);
  grad.loss = log_z - crf_path_score(model, em, length, gold);

  // Unary marginals drive emission/start/end gradients.
  for (std::size_t pos = 0; pos < length; ++pos) {
    const auto& f = features[begin + pos];
    for (std::size_t k = 0; k < t; ++k) {
      double p = std::exp(fwd[pos * t + k] + bwd[pos * t + k] - log_z);
      double residual = p - (gold[pos] == k ? 1.0 : 0.0);
      if (residual == 0.0) continue;
      for (std::size_t d = 0; d < model.feature_dim; ++d) {
        if (f[d] != 0.0) grad.emission[d * t + k] += residual * f[d];
      }
      if (pos == 0) grad.start[k] += residual;
      if (pos == length - 1) grad.end[k] += residual;
    }
  }
  // Pairwise marginals drive transition gradients.
  for (std::size_t pos = 1; pos < length; ++pos) {
    for (std::size_t j = 0; j < t; ++j) {
      for (std::size_t k = 0; k < t; ++k) {
        double p = std::exp(fwd[(pos - 1) * t + j] +
                            model.transitions[j * t + k] + em[pos * t + k] +
                            bwd[pos * t + k] - log_z);
        double gold_count =
            (gold[pos - 1] == j && gold[pos] == k) ? 1.0 : 0.0;
        grad.transitions[j * t + k] += p - gold_count;
      }
    }
  }
  return grad;
}

CrfGradient crf_gradient(const CrfModel& model, const AssembledInput& input,
                         const FeatureProvider& provider,
                         const std::vector<BioLabel>& gold) {
  check_segment(input);
  auto features = provider.featurize(input);
  auto gold_ids = gold_indices(model, input, gold);
  return crf_gradient(model, features, input.local_begin, input.local_end,
                      gold_ids);
}

std::vector<std::size_t> viterbi_path(const CrfModel& model,
                                      const std::vector<std::vector<double>>& features,
                                      std::size_t begin, std::size_t end) {
  if (begin >= end) throw DataError("viterbi_path: empty segment");
  const std::size_t t = model.num_labels();
  const std::size_t length = end - begin;
  auto em = crf_emissions(model, features, begin, end);

  std::vector<double> score(t), next(t);
  std::vector<std::size_t> back((length > 1 ? length - 1 : 0) * t, 0);
  for (std::size_t k = 0; k < t; ++k) score[k] = model.start[k] + em[k];
  for (std::size_t pos = 1; pos < length; ++pos) {
    for (std::size_t k = 0; k < t; ++k) {
      double best = kNegInf;
      std::size_t best_j = 0;
      for (std::size_t j = 0; j < t; ++j) {
        double s = score[j] + model.transitions[j * t + k];
        if (s > best) {  // strict: ties keep the lowest label index
          best = s;
          best_j = j;
        }
      }
      next[k] = best + em[pos * t + k];
      back[(pos - 1) * t + k] = best_j;
    }
    std::swap(score, next);
  }
  double best = kNegInf;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < t; ++k) {
    double s = score[k] + model.end[k];
    if (s > best) {
      best = s;
      best_k = k;
    }
  }
  std::vector<std::size_t> path(length);
  path[length - 1] = best_k;
  for (std::size_t pos = length - 1; pos > 0; --pos) {
    path[pos - 1] = back[(pos - 1) * t + path[pos]];
  }
  return path;
}

std::vector<BioLabel> viterbi_decode(const CrfModel& model,
                                     const AssembledInput& input,
                                     const FeatureProvider& provider) {
  check_segment(input);
  auto features = provider.featurize(input);
  auto path = viterbi_path(model, features, input.local_begin, input.local_end);
  std::vector<BioLabel> labels;
  labels.reserve(path.size());
  for (std::size_t k : path) labels.push_back(parse_bio_label(model.labels[k]));
  return labels;
}

namespace {

void write_values(std::ostream& out, const std::vector<double>& values) {
  char buf[40];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
    if (i > 0) out << ' ';
    out << buf;
  }
  out << '\n';
}

std::vector<double> read_values(std::istream& in, std::size_t count,
                                const char* what) {
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!(in >> values[i])) {
      throw DataError(std::string("checkpoint: truncated ") + what);
    }
  }
  return values;
}

}  // namespace

void save_crf(const CrfModel& model, std::ostream& out) {
  out << "globalner-crf 1\n";
  out << "labels " << model.num_labels();
  for (const auto& label : model.labels) out << ' ' << label;
  out << '\n';
  out << "feature_dim " << model.feature_dim << '\n';
  out << "emission\n";
  write_values(out, model.emission);
  out << "transitions\n";
  write_values(out, model.transitions);
  out << "start\n";
  write_values(out, model.start);
  out << "end\n";
  write_values(out, model.end);
}

void save_crf_file(const CrfModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  save_crf(model, out);
}

CrfModel load_crf(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "globalner-crf" || version != 1) {
    throw DataError("not a recognized checkpoint file");
  }
  CrfModel model;
  std::string key;
  std::size_t t = 0;
  if (!(in >> key >> t) || key != "labels" || t == 0) {
    throw DataError("checkpoint: bad label header");
  }
  model.labels.resize(t);
  for (auto& label : model.labels) {
    if (!(in >> label)) throw DataError("checkpoint: truncated labels");
  }
  if (!(in >> key >> model.feature_dim) || key != "feature_dim") {
    throw DataError("checkpoint: bad feature_dim header");
  }
  auto section = [&](const char* name, std::size_t count) {
    if (!(in >> key) || key != name) {
      throw DataError(std::string("checkpoint: expected section ") + name);
    }
    return read_values(in, count, name);
  };
  model.emission = section("emission", model.feature_dim * t);
  model.transitions = section("transitions", t * t);
  model.start = section("start", t);
  model.end = section("end", t);
  return model;
}

CrfModel load_crf_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  return load_crf(in);
}

}  // namespace globalner
