#pragma once

#include <vector>

#include "hbss/matrix.hpp"

namespace hbss {

/// U * M * V = D with D diagonal, diagonal entries p^e ascending, zeros last.
struct SmithForm {
  ExactMatrix diagonal;
  ExactMatrix left;
  ExactMatrix left_inverse;
  ExactMatrix right;
  /// Valuation of D(i,i) for i < rank.
  std::vector<int> exponents;
  int rank = 0;
};

SmithForm smith_normal_form(const ExactMatrix& m);

/// Generating sets for ker(M) and im(M). Over F_p these are bases; otherwise
/// they are the minimal generating sets read off the Smith form.
struct KernelImage {
  std::vector<Vector> kernel;
  std::vector<Vector> image;
};

KernelImage kernel_image(const ExactMatrix& m);

/// Isomorphism type of coker(M): free summands plus cyclic p^e summands.
struct CokernelShape {
  int free_rank = 0;
  std::vector<int> torsion;  // ascending exponents
};

CokernelShape cokernel_shape(const ExactMatrix& m);

}  // namespace hbss
