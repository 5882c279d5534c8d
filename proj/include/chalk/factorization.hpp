#pragma once

#include <optional>

#include "chalk/symplectic.hpp"

namespace chalk {

// S = V_{-P} M_L U with P symmetric, L SPD, U a symplectic rotation; the
// three factors are unique.
struct PreIwasawa {
    Mat p;               // symmetric
    Mat l;               // SPD
    SymplecticMatrix u;  // [[X, Y], [-Y, X]]
    Mat x, y;

    Mat local_part() const;   // V_{-P} M_L as a dense matrix
    Mat reconstruct() const;  // V_{-P} M_L U
};

PreIwasawa pre_iwasawa(const SymplecticMatrix& s, double tol = config().tol_residual);

// Pre-Iwasawa factors of the dilation M_K for invertible K: P = 0,
// L = (K^T K)^(1/2), X = (K^T K)^(1/2) K^-1, Y = 0.
PreIwasawa dilation_pre_iwasawa(const Mat& k, double tol = config().tol_residual);

// Free symplectic matrix split S = V_{-D B^-1} M_{B^-1} J V_{-B^-1 A}.
struct FreeFactors {
    Mat p1;     // D B^-1
    Mat l_mid;  // B^-1
    Mat p2;     // B^-1 A

    Mat reconstruct() const;
};

struct NotFreeError : NumericError {
    using NumericError::NumericError;
};

// Throws NotFreeError when det B is below the scale-aware threshold.
FreeFactors free_factorization(const SymplecticMatrix& s, double tol = config().tol_residual);

// Element of the local group Sp0(n) (optionally ISp0(n)): T(shift) V_{-P} M_L.
// The linear part always has a zero upper-right block. Composition and
// inversion are closed-form in (P, L); no dense products on this form.
class LocalElement {
  public:
    LocalElement(Mat p, Mat l, std::optional<Vec> shift = std::nullopt);
    static LocalElement identity(std::size_t n);

    const Mat& p() const { return p_; }
    const Mat& l() const { return l_; }
    const std::optional<Vec>& shift() const { return shift_; }
    std::size_t n() const { return p_.rows(); }

    Mat q() const;  // Q = P L^-1, the lower-left block of the linear part
    Vec apply(const Vec& z) const;
    Mat dense_linear() const;
    AffineSymplectic to_affine() const;
    LocalElement inverse() const;

  private:
    Mat p_, l_;
    std::optional<Vec> shift_;
};

LocalElement sp0_compose(const LocalElement& e1, const LocalElement& e2);

}  // namespace chalk
