#pragma once

#include <map>
#include <optional>
#include <vector>

#include "frolicher/bicomplex.hpp"
#include "frolicher/models.hpp"
#include "frolicher/spectral.hpp"

namespace frolicher::harmonic {

/// Per-bidegree Hermitian positive definite Gram matrices; cells without an
/// entry use the identity (orthonormal coframe monomials).
struct MetricData {
    std::map<Bidegree, Mat> gram;
};

/// Formal adjoint w.r.t. the Gram pairing: G_src^{-1} A^H G_tgt (plain
/// conjugate transpose for identity Grams).
Mat adjoint(const MetricData& m, const Bigrading& g, const Mat& op, Bidegree src,
            Bidegree tgt);

/// Bicomplex re-expressed in a metric-orthonormal frame per bidegree, so all
/// adjoints become conjugate transposes. With the default identity Grams the
/// frame is the monomial basis itself and every matrix is unchanged; operator
/// matrices returned by this module are expressed in that frame.
class Hodge {
public:
    explicit Hodge(Bicomplex b);
    Hodge(Bicomplex b, const MetricData& m);

    const Bicomplex& ortho() const { return ortho_; }
    const Bigrading& grading() const { return ortho_.grading(); }
    int n() const { return ortho_.n(); }
    bool identity_metric() const { return identity_; }

    Form to_ortho(const Form& u) const;
    Form from_ortho(const Form& u) const;

    /// Anti-linear conjugation in the orthonormal frame: coefficients of
    /// conj(u) at (q,p) are R * conj(coefficients at (p,q)).
    Mat conj_matrix(const ExteriorModel& model, Bidegree pq) const;

private:
    Bicomplex ortho_;
    bool identity_ = true;
    std::map<Bidegree, Mat> chol_;      // C with G = C^H C
    std::map<Bidegree, Mat> chol_inv_;  // C^{-1}
};

// ---------------------------------------------------------------------------
// Laplacians
// ---------------------------------------------------------------------------

/// delbar-Laplacian on one bidegree cell.
Mat delta_bar(const Hodge& h, Bidegree pq);
/// del-Laplacian on one bidegree cell.
Mat delta_prime(const Hodge& h, Bidegree pq);

/// d_h-Laplacian on total degree k (Hermitian PSD in the orthonormal frame).
Mat laplacian_h(const Hodge& hm, Cplx h, int k);

/// Second-page deformation: (del p'' + h delbar p')(...)^* +
/// (p'' del + h p' delbar)^*(...) + Delta_h on total degree k.
Mat tilde_laplacian_2_h(const Hodge& hm, Cplx h, int k);

// ---------------------------------------------------------------------------
// Harmonic tower
// ---------------------------------------------------------------------------

/// Nested omega-harmonic spaces H_1 >= H_2 >= ... with their projections,
/// Green operators, transfer operators D_j and realised differentials
/// d_r^(omega) = p_r del D_{r-1} p_r.
struct HarmonicTower {
    int r_max = 1;
    bool clamped = false;  // requested level exceeded n+1

    // level-indexed tables; index 0 is unused padding
    std::vector<std::map<Bidegree, Mat>> h_basis;       // H_j orthonormal bases
    std::vector<std::map<Bidegree, Mat>> tilde_delta;   // Delta-tilde^(j) per cell
    std::vector<std::map<Bidegree, Mat>> green;         // Green inverse of tilde_delta[j]
    std::vector<std::map<Bidegree, Mat>> transfer;      // D_j : (p,q)->(p+j,q-j), index j
    std::vector<std::map<Bidegree, Mat>> d_omega;       // full-space p_j del D_{j-1} p_j
    std::vector<std::map<Bidegree, Mat>> d_omega_cell;  // same map in the H_j bases

    Mat basis(int level, Bidegree pq) const;
    Mat projector(int level, Bidegree pq) const;
    int dim(int level, Bidegree pq) const;
};

HarmonicTower harmonic_tower(const Hodge& hm, int r_max);

/// Page-r deformation Delta-tilde^(r)_h on degree k; r = 1 gives Delta_h,
/// r = 2 the second-page operator. For r >= 3 the conjugated projections and
/// transfer operators require the model's conjugation (CapabilityError
/// otherwise), and the tower must be built at least to level r-1.
Mat tilde_laplacian_r_h(const Hodge& hm, const HarmonicTower& tower,
                        const ExteriorModel* model, int r, Cplx h, int k);

// ---------------------------------------------------------------------------
// Neumann solvers and decompositions
// ---------------------------------------------------------------------------

/// Minimal-norm tower potentials of an E_r-closed form via the Green-operator
/// formulae u_l = G^(r-l) delbar^* del u_{l-1}. Precondition: alpha in Z_r
/// (checked; PreconditionError carries the residual).
spectral::TowerWitness neumann_tower(const Hodge& hm, const HarmonicTower& tower,
                                     const Form& alpha, int r);

struct ThreeSpaceDecomposition {
    Mat kernel_basis;    // ker Delta-tilde^(r+1)
    Mat image_basis;     // Im delbar + Im(del p_1) + ... + Im(del D_{r-1} p_r)
    Mat coimage_basis;   // Im delbar^* + ... + Im(p_r del D_{r-1})^*
    Mat kernel_projector() const;
    Mat image_projector() const;
    Mat coimage_projector() const;
};

/// Orthogonal 3-space decomposition at level r (r = 0 is the classical
/// Hodge decomposition for delbar). Requires tower depth >= r+1.
ThreeSpaceDecomposition three_space_decomposition(const Hodge& hm,
                                                  const HarmonicTower& tower, int r,
                                                  int p, int q);

// ---------------------------------------------------------------------------
// Rank scans
// ---------------------------------------------------------------------------

struct FavbPoint {
    Cplx h;
    int kernel_dim = 0;
    double lambda_bk = 0.0;  // b_k-th smallest eigenvalue
    std::optional<double> lambda_bk_plus_1;
};

struct FavbScanReport {
    int k = 0;
    int r = 1;
    int betti = 0;
    std::vector<FavbPoint> points;  // grid order, h = 0 always present
    bool rank_constant = true;      // kernel dim == b_k at every grid point
    bool jump_at_zero = false;      // mismatch exactly at h = 0
};

/// Kernel dimensions and eigen-gaps of Delta-tilde^(r)_h over an h-grid
/// (h = 0 is inserted if missing). Grid points are independent; jobs > 1
/// evaluates them concurrently with identical results.
FavbScanReport favb_scan(const Hodge& hm, const HarmonicTower& tower,
                         const ExteriorModel* model, int k, int r,
                         std::vector<Cplx> h_grid, int jobs = 1);

/// Default scan grid {0} and +-2^-j, +-i 2^-j for j = 0..6.
std::vector<Cplx> default_h_grid();

struct FamilyPoint {
    Cplx t;
    Cplx h;
    int kernel_dim = 0;
    int degen_page = 1;
};

struct FamilyScanReport {
    int k = 0;
    int betti = 0;  // at t = 0
    std::vector<FamilyPoint> points;
    bool fibre_rank_constant = true;
    bool hodge_upper_semicontinuous = true;  // h^{p,q}(0) >= h^{p,q}(t)
};

/// Fibrewise d_h-cohomology dims over an (h,t) grid; at h = 0 the reported
/// dimension is the degenerating-page total of the fibre at t.
FamilyScanReport family_scan(const FamilySpec& fam, int k, std::vector<Cplx> h_grid,
                             const std::vector<Cplx>& t_grid, int jobs = 1);

}  // namespace frolicher::harmonic
