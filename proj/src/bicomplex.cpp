#include "frolicher/bicomplex.hpp"

#include <cmath>

#include "frolicher/linalg.hpp"

namespace frolicher {

namespace {

Cplx pow_int(Cplx h, int p) {
    Cplx r{1.0, 0.0};
    for (int i = 0; i < p; ++i) r *= h;
    return r;
}

}  // namespace

Form& Form::operator+=(const Form& other) {
    for (const auto& [pq, v] : other.components) {
        auto it = components.find(pq);
        if (it == components.end())
            components[pq] = v;
        else
            it->second += v;
    }
    return *this;
}

Form& Form::operator-=(const Form& other) {
    for (const auto& [pq, v] : other.components) {
        auto it = components.find(pq);
        if (it == components.end())
            components[pq] = -v;
        else
            it->second -= v;
    }
    return *this;
}

Form& Form::operator*=(Cplx c) {
    for (auto& [pq, v] : components) v *= c;
    return *this;
}

Form operator+(Form a, const Form& b) { return a += b; }
Form operator-(Form a, const Form& b) { return a -= b; }
Form operator*(Cplx c, Form a) { return a *= c; }

Bicomplex::Bicomplex(Bigrading grading, std::map<Bidegree, Mat> del,
                     std::map<Bidegree, Mat> delbar)
    : grading_(std::move(grading)), del_(std::move(del)), delbar_(std::move(delbar)) {}

Mat Bicomplex::op_at(const std::map<Bidegree, Mat>& table, int p, int q, int dp,
                     int dq) const {
    auto it = table.find({p, q});
    if (it != table.end()) return it->second;
    return Mat::Zero(grading_.dim(p + dp, q + dq), grading_.dim(p, q));
}

Form Bicomplex::zero_form(int k) const {
    Form u;
    u.degree = k;
    for (const auto& [pq, d] : grading_.cells_of_degree(k)) u.components[pq] = Vec::Zero(d);
    return u;
}

Form Bicomplex::apply_del(const Form& u) const {
    Form out = zero_form(u.degree + 1);
    for (const auto& [pq, v] : u.components) {
        Bidegree tgt{pq.p + 1, pq.q};
        if (grading_.dim(tgt) == 0) continue;
        out.components[tgt] += del(pq) * v;
    }
    return out;
}

Form Bicomplex::apply_delbar(const Form& u) const {
    Form out = zero_form(u.degree + 1);
    for (const auto& [pq, v] : u.components) {
        Bidegree tgt{pq.p, pq.q + 1};
        if (grading_.dim(tgt) == 0) continue;
        out.components[tgt] += delbar(pq) * v;
    }
    return out;
}

Form Bicomplex::apply_d_h(const Form& u, Cplx h) const {
    Form out = apply_delbar(u);
    Form du = apply_del(u);
    du *= h;
    out += du;
    return out;
}

Vec Bicomplex::flatten(const Form& u) const {
    const auto cells = grading_.cells_of_degree(u.degree);
    Vec out = Vec::Zero(grading_.total_dim(u.degree));
    Eigen::Index at = 0;
    for (const auto& [pq, d] : cells) {
        if (const Vec* v = u.component(pq)) out.segment(at, d) = *v;
        at += d;
    }
    return out;
}

Form Bicomplex::unflatten(int k, const Vec& coords) const {
    Form out;
    out.degree = k;
    Eigen::Index at = 0;
    for (const auto& [pq, d] : grading_.cells_of_degree(k)) {
        out.components[pq] = coords.segment(at, d);
        at += d;
    }
    return out;
}

// ---------------------------------------------------------------------------

ValidationReport validate_bicomplex(const Bicomplex& b, double tol) {
    const auto& g = b.grading();
    const int n = g.n();

    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            const Mat dl = b.del(p, q);
            if (dl.rows() != g.dim(p + 1, q) || dl.cols() != g.dim(p, q))
                throw StructuralError("del has inconsistent shape at " + to_string({p, q}));
            const Mat db = b.delbar(p, q);
            if (db.rows() != g.dim(p, q + 1) || db.cols() != g.dim(p, q))
                throw StructuralError("delbar has inconsistent shape at " + to_string({p, q}));
        }

    double op_norm = 0.0;
    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            op_norm = std::max(op_norm, lin::max_abs(b.del(p, q)));
            op_norm = std::max(op_norm, lin::max_abs(b.delbar(p, q)));
        }
    const double cutoff = tol * (1.0 + op_norm) * (1.0 + op_norm);

    ValidationReport report;
    auto check = [&](const std::string& name, Bidegree at, const Mat& m) {
        const double res = lin::max_abs(m);
        if (res > cutoff) {
            report.valid = false;
            report.violations.push_back({name, at, res});
        }
    };

    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            if (g.dim(p, q) == 0) continue;
            check("del^2", {p, q}, b.del(p + 1, q) * b.del(p, q));
            check("delbar^2", {p, q}, b.delbar(p, q + 1) * b.delbar(p, q));
            check("anticommute", {p, q},
                  b.delbar(p + 1, q) * b.del(p, q) + b.del(p, q + 1) * b.delbar(p, q));
        }
    return report;
}

Mat d_h_total(const Bicomplex& b, Cplx h, int k) {
    const auto& g = b.grading();
    if (k < 0 || k > 2 * g.n()) throw DomainError("degree k out of range: " + std::to_string(k));

    const auto src = g.cells_of_degree(k);
    const auto tgt = g.cells_of_degree(k + 1);

    std::map<Bidegree, Eigen::Index> tgt_offset;
    Eigen::Index at = 0;
    for (const auto& [pq, d] : tgt) {
        tgt_offset[pq] = at;
        at += d;
    }

    Mat out = Mat::Zero(g.total_dim(k + 1), g.total_dim(k));
    Eigen::Index col = 0;
    for (const auto& [pq, d] : src) {
        if (auto it = tgt_offset.find({pq.p + 1, pq.q}); it != tgt_offset.end())
            out.block(it->second, col, g.dim(pq.p + 1, pq.q), d) = h * b.del(pq);
        if (auto it = tgt_offset.find({pq.p, pq.q + 1}); it != tgt_offset.end())
            out.block(it->second, col, g.dim(pq.p, pq.q + 1), d) = b.delbar(pq);
        col += d;
    }
    return out;
}

Form theta_h(const Form& u, Cplx h) {
    Form out = u;
    for (auto& [pq, v] : out.components) v *= pow_int(h, pq.p);
    return out;
}

Mat theta_h_matrix(const Bicomplex& b, Cplx h, int k) {
    const auto cells = b.grading().cells_of_degree(k);
    const Eigen::Index total = b.grading().total_dim(k);
    Mat out = Mat::Zero(total, total);
    Eigen::Index at = 0;
    for (const auto& [pq, d] : cells) {
        out.block(at, at, d, d) = pow_int(h, pq.p) * Mat::Identity(d, d);
        at += d;
    }
    return out;
}

CohomologySpace cohomology(const Bicomplex& b, CohomologyKind kind, int k, Cplx h) {
    Cplx hh = h;
    if (kind == CohomologyKind::DeRham) hh = Cplx(1, 0);
    if (kind == CohomologyKind::DelbarTotal) hh = Cplx(0, 0);

    const Mat down = d_h_total(b, hh, k);
    const Mat lap = [&] {
        Mat l = down.adjoint() * down;
        if (k > 0) {
            const Mat up = d_h_total(b, hh, k - 1);
            l += up * up.adjoint();
        }
        return l;
    }();

    auto spec = lin::hermitian_spectrum(lap);
    CohomologySpace out;
    out.degree = k;
    out.kind = kind;
    out.h = hh;
    out.dimension = spec.kernel_dim;
    out.basis_matrix = spec.eigenvectors.leftCols(spec.kernel_dim);
    for (int i = 0; i < out.dimension; ++i)
        out.basis.push_back(b.unflatten(k, out.basis_matrix.col(i)));
    return out;
}

int betti(const Bicomplex& b, int k) {
    return cohomology(b, CohomologyKind::DeRham, k).dimension;
}

Mat theta_h_cohomology_map(const Bicomplex& b, Cplx h, int k) {
    if (h == Cplx(0, 0))
        throw DomainError("theta_h cohomology map requires h != 0");
    const CohomologySpace dr = cohomology(b, CohomologyKind::DeRham, k);
    const CohomologySpace dh = cohomology(b, CohomologyKind::Dh, k, h);
    // theta_h of a d-closed form is d_h-closed, so its class coordinates in
    // the harmonic basis are the plain inner products.
    return dh.basis_matrix.adjoint() * theta_h_matrix(b, h, k) * dr.basis_matrix;
}

}  // namespace frolicher
