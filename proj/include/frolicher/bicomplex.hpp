#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frolicher/types.hpp"

namespace frolicher {

/// Dimension table of a bounded bigraded space: dims(p,q) for 0 <= p,q <= n,
/// zero outside that square.
class Bigrading {
public:
    Bigrading() = default;
    Bigrading(int n, std::map<Bidegree, int> dims) : n_(n), dims_(std::move(dims)) {}

    int n() const { return n_; }

    int dim(int p, int q) const {
        if (p < 0 || q < 0 || p > n_ || q > n_) return 0;
        auto it = dims_.find({p, q});
        return it == dims_.end() ? 0 : it->second;
    }
    int dim(Bidegree pq) const { return dim(pq.p, pq.q); }

    int total_dim(int k) const {
        int d = 0;
        for (const auto& [pq, v] : cells_of_degree(k)) d += v;
        return d;
    }

    /// Bidegrees (p,q) with p+q = k and dims > 0, ordered by ascending p.
    std::vector<std::pair<Bidegree, int>> cells_of_degree(int k) const {
        std::vector<std::pair<Bidegree, int>> out;
        for (int p = std::max(0, k - n_); p <= std::min(n_, k); ++p) {
            const int d = dim(p, k - p);
            if (d > 0) out.push_back({{p, k - p}, d});
        }
        return out;
    }

private:
    int n_ = 0;
    std::map<Bidegree, int> dims_;
};

/// A form of pure total degree: one coefficient vector per bidegree cell.
struct Form {
    int degree = 0;
    std::map<Bidegree, Vec> components;

    const Vec* component(Bidegree pq) const {
        auto it = components.find(pq);
        return it == components.end() ? nullptr : &it->second;
    }

    double norm() const {
        double s = 0;
        for (const auto& [pq, v] : components) s += v.squaredNorm();
        return std::sqrt(s);
    }

    Form& operator+=(const Form& other);
    Form& operator-=(const Form& other);
    Form& operator*=(Cplx c);
};

Form operator+(Form a, const Form& b);
Form operator-(Form a, const Form& b);
Form operator*(Cplx c, Form a);

/// Finite bigraded complex with anticommuting differentials del (bidegree
/// (1,0)) and delbar (bidegree (0,1)).
class Bicomplex {
public:
    Bicomplex() = default;
    Bicomplex(Bigrading grading, std::map<Bidegree, Mat> del, std::map<Bidegree, Mat> delbar);

    const Bigrading& grading() const { return grading_; }
    int n() const { return grading_.n(); }

    /// del at (p,q): dims(p+1,q) x dims(p,q). Out-of-range cells give
    /// zero-sized matrices of the right shape.
    Mat del(int p, int q) const { return op_at(del_, p, q, 1, 0); }
    Mat delbar(int p, int q) const { return op_at(delbar_, p, q, 0, 1); }
    Mat del(Bidegree pq) const { return del(pq.p, pq.q); }
    Mat delbar(Bidegree pq) const { return delbar(pq.p, pq.q); }

    Form zero_form(int k) const;
    Form apply_del(const Form& u) const;
    Form apply_delbar(const Form& u) const;
    Form apply_d_h(const Form& u, Cplx h) const;

    /// Coordinates of a degree-k form in the concatenated cell layout
    /// (ascending p).
    Vec flatten(const Form& u) const;
    Form unflatten(int k, const Vec& coords) const;

private:
    Mat op_at(const std::map<Bidegree, Mat>& table, int p, int q, int dp, int dq) const;

    Bigrading grading_;
    std::map<Bidegree, Mat> del_;
    std::map<Bidegree, Mat> delbar_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

struct IdentityViolation {
    std::string identity;  // "del^2", "delbar^2", "anticommute"
    Bidegree at;
    double residual = 0.0;
};

struct ValidationReport {
    bool valid = true;
    std::vector<IdentityViolation> violations;
};

/// Checks del^2 = 0, delbar^2 = 0 and del*delbar + delbar*del = 0 on every
/// cell. Shape inconsistencies throw StructuralError naming the bidegree.
ValidationReport validate_bicomplex(const Bicomplex& b, double tol = tolerances().zero);

/// Total-degree matrix of d_h = h*del + delbar from degree k to k+1.
Mat d_h_total(const Bicomplex& b, Cplx h, int k);

/// Componentwise rescaling u^{p,q} -> h^p u^{p,q}. At h = 0 this is the
/// projection onto the (0,k) component.
Form theta_h(const Form& u, Cplx h);

/// theta_h as a matrix on the degree-k coordinate layout.
Mat theta_h_matrix(const Bicomplex& b, Cplx h, int k);

enum class CohomologyKind { DeRham, Dh, DelbarTotal };

struct CohomologySpace {
    int degree = 0;
    int dimension = 0;
    std::vector<Form> basis;  // orthonormal harmonic representatives
    Mat basis_matrix;         // same data, one column per class
    CohomologyKind kind = CohomologyKind::DeRham;
    Cplx h{1.0, 0.0};
};

/// Harmonic realisation of d_h-cohomology in degree k. DeRham is h = 1,
/// DelbarTotal is h = 0.
CohomologySpace cohomology(const Bicomplex& b, CohomologyKind kind, int k,
                           Cplx h = Cplx(0, 0));

/// Betti number b_k.
int betti(const Bicomplex& b, int k);

/// Matrix of theta_h : H^k_DR -> H^k_{d_h} in harmonic bases; invertible for
/// h != 0 (h = 0 is a DomainError; the h = 0 projection lives in spectral).
Mat theta_h_cohomology_map(const Bicomplex& b, Cplx h, int k);

}  // namespace frolicher
