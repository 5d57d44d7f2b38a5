#pragma once

// Cylindrical (r,z) cell-centred grid, axisymmetric scalar fields and the
// second-order finite-difference operators acting on them.
//
// Layout: cell (j,k) sits at r_j = (j+1/2) dr, z_k = -Lz/2 + (k+1/2) dz.
// Values are stored with the r index fastest: values[j + Nr*k].
// Ghost cells are never stored; they are synthesised from the field's axis
// parity (j = -1) and wall boundary tag (j = Nr). z is periodic.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace axmb {

class GridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Parity { even, odd };
enum class Boundary { dirichlet0, neumann0 };

class Grid {
public:
    Grid(std::size_t nr, std::size_t nz, double radius, double length);

    std::size_t nr() const { return nr_; }
    std::size_t nz() const { return nz_; }
    std::size_t size() const { return nr_ * nz_; }
    double radius() const { return radius_; }
    double length() const { return length_; }
    double dr() const { return dr_; }
    double dz() const { return dz_; }
    double h_min() const { return dr_ < dz_ ? dr_ : dz_; }

    double r(std::size_t j) const { return r_[j]; }
    /// Radius of the face between cells j-1 and j (j = 0 is the axis, j = Nr the wall).
    double r_face(std::size_t j) const { return static_cast<double>(j) * dr_; }
    double z(std::size_t k) const { return -0.5 * length_ + (static_cast<double>(k) + 0.5) * dz_; }
    std::span<const double> r_centers() const { return r_; }

    /// 2*pi*r_j*dr*dz, the exact volume of the annular cell.
    double volume(std::size_t j) const { return vol_[j]; }

    std::size_t index(std::size_t j, std::size_t k) const { return j + nr_ * k; }
    std::size_t kp(std::size_t k) const { return k + 1 == nz_ ? 0 : k + 1; }
    std::size_t km(std::size_t k) const { return k == 0 ? nz_ - 1 : k - 1; }

    bool operator==(const Grid& o) const {
        return nr_ == o.nr_ && nz_ == o.nz_ && radius_ == o.radius_ && length_ == o.length_;
    }

private:
    std::size_t nr_, nz_;
    double radius_, length_;
    double dr_, dz_;
    std::vector<double> r_;
    std::vector<double> vol_;
};

Grid build_grid(std::size_t nr, std::size_t nz, double radius, double length);

/// One axisymmetric scalar sampled at cell centres.
struct ScalarField {
    std::vector<double> values;
    Parity parity = Parity::even;
    Boundary boundary = Boundary::dirichlet0;

    ScalarField() = default;
    ScalarField(const Grid& g, Parity p = Parity::even, Boundary b = Boundary::dirichlet0)
        : values(g.size(), 0.0), parity(p), boundary(b) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }

    /// Value with ghost handling for j in [-1, Nr]; k is already wrapped.
    double at(const Grid& g, long j, std::size_t k) const {
        const long nr = static_cast<long>(g.nr());
        if (j < 0) {
            const double v = values[g.index(0, k)];
            return parity == Parity::even ? v : -v;
        }
        if (j >= nr) {
            const double v = values[g.index(g.nr() - 1, k)];
            return boundary == Boundary::neumann0 ? v : -v;
        }
        return values[g.index(static_cast<std::size_t>(j), k)];
    }

    bool all_finite() const;
    double max_abs() const;
};

/// Samples f(r,z) at cell centres.
template <class F>
ScalarField sample(const Grid& g, F&& f, Parity p = Parity::even, Boundary b = Boundary::dirichlet0) {
    ScalarField out(g, p, b);
    for (std::size_t k = 0; k < g.nz(); ++k)
        for (std::size_t j = 0; j < g.nr(); ++j)
            out[g.index(j, k)] = f(g.r(j), g.z(k));
    return out;
}

// Pointwise helpers. Results inherit a's tags unless noted.
ScalarField axpby(double a, const ScalarField& x, double b, const ScalarField& y);
ScalarField scaled(double a, const ScalarField& x);
ScalarField multiply(const ScalarField& x, const ScalarField& y);
/// x * r^power at every cell centre.
ScalarField times_r_pow(const Grid& g, const ScalarField& x, int power);

// Centred first derivatives. ddr flips parity; wall tag flips between
// dirichlet0 and neumann0 (derivative of a zero-value field is free, of a
// zero-slope field vanishes).
ScalarField ddr(const ScalarField& f, const Grid& g);
ScalarField ddz(const ScalarField& f, const Grid& g);
// Compact three-point second derivatives.
ScalarField d2r(const ScalarField& f, const Grid& g);
ScalarField d2z(const ScalarField& f, const Grid& g);

/// d_rr f + (1/r) d_r f + d_zz f
ScalarField lap_cyl(const ScalarField& f, const Grid& g);
/// d_rr f + (3/r) d_r f + d_zz f
ScalarField d_plus(const ScalarField& f, const Grid& g);
/// d_rr f - (1/r) d_r f + d_zz f
ScalarField d_minus(const ScalarField& f, const Grid& g);

double cyl_integral(const ScalarField& f, const Grid& g);
/// p >= 1, or p = infinity.
double cyl_lp_norm(const ScalarField& f, const Grid& g, double p);

}  // namespace axmb
