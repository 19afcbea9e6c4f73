#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gapgraph/classes.hpp"
#include "gapgraph/spectral.hpp"

namespace gapgraph {

enum class Direction { Minimize, Maximize };
enum class Verdict { NotMinimal, NotMaximal, Inconclusive };

std::string_view to_string(Direction d) noexcept;
std::string_view to_string(Verdict v) noexcept;

/// Unit L2 norm, or u2 scaled to 1 at a vertex (u1 keeps unit L2 norm).
struct Normalization {
  enum class Kind { L2, UnitAtVertex };
  Kind kind = Kind::L2;
  VertexId vertex{0};

  static Normalization l2() { return {}; }
  static Normalization unit_at(VertexId v) { return {Kind::UnitAtVertex, v}; }
  std::string describe(const MetricGraph& g) const;
};

struct FHValue {
  double value = 0.0;
  /// |fine - coarse| / 3 when the spectrum was extrapolated.
  double error = 0.0;
};

/// int P (u2^2 - u1^2). Throws DegenerateSecond when lambda_2 is clustered.
FHValue fh_integral(const SpectrumResult& spec, const Potential& P, const MetricGraph& g,
                    const Normalization& norm = {});

struct FHMatrix {
  /// P_jk = int P (u2^(j) u2^(k) - u1^2) on the fine level (extrapolated when 1x1).
  std::vector<std::vector<double>> entries;
  /// Ascending eigenvalues, Richardson-extrapolated across levels.
  std::vector<double> eigenvalues;
  std::vector<double> errors;
  std::size_t multiplicity = 1;
};

FHMatrix fh_matrix(const SpectrumResult& spec, const Potential& P);

/// `integral` and `error_estimate` use the requested normalization. The verdict
/// and `margin` always use the L2-normalized matrix eigenvalues.
struct FHReport {
  double integral = 0.0;  // 1x1 value; equals the smallest matrix eigenvalue otherwise
  FHMatrix matrix;
  std::size_t multiplicity = 1;
  std::optional<AdmissibleRange> range;
  Verdict verdict = Verdict::Inconclusive;
  Direction direction = Direction::Minimize;
  double error_estimate = 0.0;
  double margin = 0.0;
  std::string normalization;
  std::string note;
};

struct CertifyOptions {
  SolveOptions solve{.k = 6};
  ShiftPolicy policy = ShiftPolicy::ModuloConstants;
  double margin_factor = 10.0;
  Normalization normalization;
};

/// First-order test of optimality of q along P. Throws NotInClass.
FHReport certify_non_optimal(const MetricGraph& g, const Potential& q, const PotentialClass& cls,
                             const Potential& P, Direction direction, const CertifyOptions& options = {});

/// Same, reusing a spectrum of q already at hand.
FHReport certify_with_spectrum(const MetricGraph& g, const Potential& q, const SpectrumResult& spec,
                               const PotentialClass& cls, const Potential& P, Direction direction,
                               const CertifyOptions& options = {});

}  // namespace gapgraph
