#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "globalner/assemble.hpp"
#include "globalner/bio.hpp"
#include "globalner/features.hpp"

namespace globalner {

// Linear-chain CRF over per-position feature vectors. The chain runs over
// the masked-in (local) positions only; marker and reference positions
// contribute nothing to scores, loss, or decoding.
struct CrfModel {
  std::vector<std::string> labels;  // e.g. {"O", "B", "I"}
  std::size_t feature_dim = 0;
  std::vector<double> emission;     // feature_dim x T, row-major [f * T + t]
  std::vector<double> transitions;  // T x T, [from * T + to]
  std::vector<double> start;        // T
  std::vector<double> end;          // T

  std::size_t num_labels() const { return labels.size(); }
  std::size_t label_index(const BioLabel& label) const;  // throws DataError

  // Seeded uniform init in [-scale, scale].
  static CrfModel init(std::vector<std::string> labels, std::size_t feature_dim,
                       std::uint64_t seed, double scale = 0.01);
};

// Emission scores for the local segment: L x T matrix, L = local length.
std::vector<double> crf_emissions(const CrfModel& model,
                                  const std::vector<std::vector<double>>& features,
                                  std::size_t begin, std::size_t end);

// log sum over all label paths of exp(path score), including start/end.
double crf_log_partition(const CrfModel& model,
                         const std::vector<std::vector<double>>& features,
                         std::size_t begin, std::size_t end);

// Score of one concrete label path over the local segment.
double crf_path_score(const CrfModel& model,
                      const std::vector<double>& emissions, std::size_t length,
                      const std::vector<std::size_t>& path);

// Masked negative log-likelihood: logZ - score(gold). Gold labels must
// cover exactly the masked-in positions.
double crf_nll_masked(const CrfModel& model, const AssembledInput& input,
                      const FeatureProvider& provider,
                      const std::vector<BioLabel>& gold);

struct CrfGradient {
  std::vector<double> emission;
  std::vector<double> transitions;
  std::vector<double> start;
  std::vector<double> end;
  double loss = 0.0;

  void accumulate(const CrfGradient& other);
  void scale(double factor);
};

// Exact gradient of the masked NLL via forward-backward expected counts.
CrfGradient crf_gradient(const CrfModel& model,
                         const std::vector<std::vector<double>>& features,
                         std::size_t begin, std::size_t end,
                         const std::vector<std::size_t>& gold);

CrfGradient crf_gradient(const CrfModel& model, const AssembledInput& input,
                         const FeatureProvider& provider,
                         const std::vector<BioLabel>& gold);

// Best-scoring label path for the masked-in positions; score ties at each
// backtrack step resolve to the lowest label index.
std::vector<std::size_t> viterbi_path(const CrfModel& model,
                                      const std::vector<std::vector<double>>& features,
                                      std::size_t begin, std::size_t end);

std::vector<BioLabel> viterbi_decode(const CrfModel& model,
                                     const AssembledInput& input,
                                     const FeatureProvider& provider);

// Versioned text checkpoint; values round-trip exactly.
void save_crf(const CrfModel& model, std::ostream& out);
void save_crf_file(const CrfModel& model, const std::string& path);
CrfModel load_crf(std::istream& in);
CrfModel load_crf_file(const std::string& path);

}  // namespace globalner
