#pragma once

#include <map>
#include <optional>
#include <vector>

#include "frolicher/bicomplex.hpp"
#include "frolicher/models.hpp"

namespace frolicher::spectral {

/// Witness for E_r-closedness of alpha at (p,q): the tower
///   delbar alpha = 0, del alpha = delbar u_1, del u_l = delbar u_{l+1}.
struct TowerWitness {
    Form alpha;
    std::vector<Form> u;  // u[l-1] lives at (p+l, q-l)
};

/// Witness for E_r-exactness: alpha = del zeta + delbar xi with the side
/// tower delbar zeta = del v_{r-3}, ..., delbar v_0 = 0.
struct ExactnessWitness {
    Form zeta;
    Form xi;
    std::vector<Form> v;  // v[j] at (p-r+1+j, q+r-2-j)
};

/// Orthonormal basis of the E_r-closed space Z_r^{p,q} (projection onto the
/// alpha coordinates of the kernel of the stacked tower system).
Mat er_closed_space(const Bicomplex& b, int p, int q, int r);

/// Orthonormal basis of the E_r-exact space B_r^{p,q}.
Mat er_exact_space(const Bicomplex& b, int p, int q, int r);

struct PageCell {
    int dim = 0;
    Mat representatives;  // orthonormal basis of Z_r intersect B_r-perp
    Mat closed_basis;     // Z_r
    Mat exact_basis;      // B_r
};

struct PageTable {
    int r = 1;
    std::map<Bidegree, PageCell> cells;
    std::map<int, int> totals;  // degree k -> sum of cell dims
    std::optional<int> degeneration_page;

    const PageCell& cell(int p, int q) const;
};

/// Dimension-only table of E_r cell dims (used for stabilisation scans).
std::map<Bidegree, int> page_dims(const Bicomplex& b, int r);

/// Full page with orthonormal quotient representatives. The degeneration
/// page is detected by total-dimension stabilisation at the Betti numbers
/// (always reached by r = n+1).
PageTable page(const Bicomplex& b, int r);

/// Smallest r with sum_{p+q=k} dim E_r^{p,q} = b_k for every k.
int degeneration_page(const Bicomplex& b);

/// Matrix of d_r : E_r^{p,q} -> E_r^{p+r,q-r+1} in the representative bases
/// of the given page. Witness potentials are the minimal-norm solution of
/// the stacked tower system, which makes the induced map independent of the
/// witness choice.
Mat dr_map(const Bicomplex& b, const PageTable& pg, int p, int q);
Mat dr_map(const Bicomplex& b, int r, int p, int q);

/// Minimal-norm witness of E_r-closedness for one alpha (least-squares on
/// the stacked system; independent of the harmonic route).
TowerWitness tower_witness(const Bicomplex& b, const Form& alpha, int r);

/// Matrix of theta_0 : H^k_DR -> E_infty^{0,k} (class of the (0,k)
/// component); full row rank by surjectivity.
Mat theta0_map(const Bicomplex& b, int k);

struct TypeOneOneResult {
    bool is_type_one_one = false;
    double e_infty_02_residual = 0.0;  // norm of the class of c^{0,2}
    std::optional<Form> certificate;   // d-closed (1,1) representative
};

/// Criterion for a real De Rham 2-class to be of type (1,1): the E_infty
/// class of its (0,2) component vanishes. Non-real input is a DomainError.
TypeOneOneResult is_type_one_one(const ExteriorModel& model, const Form& c);

}  // namespace frolicher::spectral
