#include "frolicher/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "frolicher/linalg.hpp"

namespace frolicher::spectral {

namespace {

/// Column layout for a list of bidegree-cell variables.
struct VarLayout {
    std::vector<Bidegree> cells;
    std::vector<Eigen::Index> offsets;
    Eigen::Index total = 0;

    void add(const Bigrading& g, Bidegree pq) {
        cells.push_back(pq);
        offsets.push_back(total);
        total += g.dim(pq);
    }
};

Bidegree pure_bidegree(const Form& u) {
    const double total = u.norm();
    Bidegree found{-1, -1};
    int count = 0;
    for (const auto& [pq, v] : u.components)
        if (v.norm() > 1e-13 * (1.0 + total)) {
            found = pq;
            ++count;
        }
    if (count > 1) throw DomainError("pure-type form expected");
    return found;
}

}  // namespace

const PageCell& PageTable::cell(int p, int q) const {
    static const PageCell empty{};
    auto it = cells.find({p, q});
    return it == cells.end() ? empty : *&it->second;
}

Mat er_closed_space(const Bicomplex& b, int p, int q, int r) {
    if (r < 1) throw DomainError("page index r must be >= 1");
    const auto& g = b.grading();
    const int d0 = g.dim(p, q);
    if (d0 == 0) return Mat(0, 0);

    VarLayout vars;
    vars.add(g, {p, q});
    for (int l = 1; l <= r - 1; ++l) vars.add(g, {p + l, q - l});

    // rows: delbar alpha = 0; del alpha - delbar u_1 = 0;
    //       del u_l - delbar u_{l+1} = 0
    Eigen::Index rows = g.dim(p, q + 1);
    for (int l = 0; l <= r - 2; ++l) rows += g.dim(p + l + 1, q - l);

    Mat s = Mat::Zero(rows, vars.total);
    Eigen::Index row_at = 0;
    {
        const Mat db = b.delbar(p, q);
        s.block(row_at, vars.offsets[0], db.rows(), db.cols()) = db;
        row_at += db.rows();
    }
    for (int l = 0; l <= r - 2; ++l) {
        const Bidegree src{p + l, q - l};
        const Mat dl = b.del(src);
        if (dl.rows() > 0) {
            s.block(row_at, vars.offsets[l], dl.rows(), dl.cols()) = dl;
            const Mat db = b.delbar(src.p + 1, src.q - 1);
            s.block(row_at, vars.offsets[l + 1], db.rows(), db.cols()) = -db;
        }
        row_at += dl.rows();
    }

    const Mat k = lin::kernel(s);
    return lin::column_space(k.topRows(d0));
}

Mat er_exact_space(const Bicomplex& b, int p, int q, int r) {
    if (r < 1) throw DomainError("page index r must be >= 1");
    const auto& g = b.grading();
    const int d0 = g.dim(p, q);
    if (d0 == 0) return Mat(0, 0);

    VarLayout vars;
    const bool has_zeta = r >= 2;
    if (has_zeta) vars.add(g, {p - 1, q});
    const Eigen::Index xi_index = vars.cells.size();
    vars.add(g, {p, q - 1});
    // v_j at (p-r+1+j, q+r-2-j), j = 0..r-3
    for (int j = 0; j <= r - 3; ++j) vars.add(g, {p - r + 1 + j, q + r - 2 - j});

    Eigen::Index rows = 0;
    if (has_zeta) rows += g.dim(p - 1, q + 1);
    for (int j = r - 3; j >= 1; --j) rows += g.dim(p - r + 1 + j, q + r - 1 - j);
    if (r >= 3) rows += g.dim(p - r + 1, q + r - 1);

    Mat s = Mat::Zero(rows, vars.total);
    Eigen::Index row_at = 0;
    if (has_zeta) {
        const Mat db = b.delbar(p - 1, q);
        s.block(row_at, vars.offsets[0], db.rows(), db.cols()) = db;
        if (r >= 3) {
            // minus del v_{r-3}
            const Eigen::Index vi = xi_index + 1 + (r - 3);
            const Mat dl = b.del(p - 2, q + 1);
            s.block(row_at, vars.offsets[vi], dl.rows(), dl.cols()) = -dl;
        }
        row_at += db.rows();
    }
    for (int j = r - 3; j >= 1; --j) {
        const Bidegree vj{p - r + 1 + j, q + r - 2 - j};
        const Mat db = b.delbar(vj);
        const Eigen::Index vi = xi_index + 1 + j;
        s.block(row_at, vars.offsets[vi], db.rows(), db.cols()) = db;
        const Mat dl = b.del(p - r + j, q + r - 1 - j);
        s.block(row_at, vars.offsets[vi - 1], dl.rows(), dl.cols()) = -dl;
        row_at += db.rows();
    }
    if (r >= 3) {
        const Mat db = b.delbar(p - r + 1, q + r - 2);
        s.block(row_at, vars.offsets[xi_index + 1], db.rows(), db.cols()) = db;
        row_at += db.rows();
    }

    const Mat k = rows == 0 ? Mat(Mat::Identity(vars.total, vars.total)) : lin::kernel(s);

    // image of (zeta, xi) |-> del zeta + delbar xi over the constraint kernel
    Mat image = Mat::Zero(d0, k.cols());
    if (has_zeta && g.dim(p - 1, q) > 0)
        image += b.del(p - 1, q) * k.middleRows(vars.offsets[0], g.dim(p - 1, q));
    if (g.dim(p, q - 1) > 0)
        image += b.delbar(p, q - 1) * k.middleRows(vars.offsets[xi_index], g.dim(p, q - 1));
    return lin::column_space(image);
}

std::map<Bidegree, int> page_dims(const Bicomplex& b, int r) {
    std::map<Bidegree, int> out;
    const int n = b.n();
    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            if (b.grading().dim(p, q) == 0) continue;
            const Mat z = er_closed_space(b, p, q, r);
            const Mat bb = er_exact_space(b, p, q, r);
            out[{p, q}] = static_cast<int>(z.cols() - bb.cols());
        }
    return out;
}

int degeneration_page(const Bicomplex& b) {
    const int n = b.n();
    std::vector<int> betti_k(2 * n + 1);
    for (int k = 0; k <= 2 * n; ++k) betti_k[k] = betti(b, k);
    for (int r = 1; r <= n + 1; ++r) {
        const auto dims = page_dims(b, r);
        std::map<int, int> totals;
        for (const auto& [pq, d] : dims) totals[pq.p + pq.q] += d;
        bool stable = true;
        for (int k = 0; k <= 2 * n; ++k)
            if (totals[k] != betti_k[k]) stable = false;
        if (stable) return r;
    }
    throw Error("spectral sequence did not stabilise by page n+1");
}

PageTable page(const Bicomplex& b, int r) {
    if (r < 1) throw DomainError("page index r must be >= 1");
    PageTable table;
    table.r = r;
    const int n = b.n();
    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            if (b.grading().dim(p, q) == 0) continue;
            PageCell cell;
            cell.closed_basis = er_closed_space(b, p, q, r);
            cell.exact_basis = er_exact_space(b, p, q, r);
            const Mat residual =
                cell.closed_basis - lin::projector(cell.exact_basis) * cell.closed_basis;
            cell.representatives = lin::column_space(residual);
            cell.dim = static_cast<int>(cell.representatives.cols());
            table.totals[p + q] += cell.dim;
            table.cells[{p, q}] = std::move(cell);
        }
    table.degeneration_page = degeneration_page(b);
    return table;
}

TowerWitness tower_witness(const Bicomplex& b, const Form& alpha, int r) {
    const auto& g = b.grading();
    const Bidegree pq = pure_bidegree(alpha);
    TowerWitness w;
    w.alpha = alpha;
    if (pq.p < 0) {  // zero form
        for (int l = 1; l <= r - 1; ++l) w.u.push_back(b.zero_form(alpha.degree));
        return w;
    }
    const Vec a = *alpha.component(pq);
    const double scale = 1.0 + a.norm();

    const Vec dbar_a = b.delbar(pq).cols() ? Vec(b.delbar(pq) * a) : Vec(0);
    if (dbar_a.size() && dbar_a.norm() > 1e-8 * scale)
        throw PreconditionError("form is not delbar-closed (residual " +
                                std::to_string(dbar_a.norm()) + ")");
    if (r == 1) return w;

    VarLayout vars;
    for (int l = 1; l <= r - 1; ++l) vars.add(g, {pq.p + l, pq.q - l});

    Eigen::Index rows = 0;
    for (int l = 0; l <= r - 2; ++l) rows += g.dim(pq.p + l + 1, pq.q - l);

    Mat s = Mat::Zero(rows, vars.total);
    Vec rhs = Vec::Zero(rows);
    Eigen::Index row_at = 0;
    for (int l = 0; l <= r - 2; ++l) {
        const Bidegree src{pq.p + l, pq.q - l};
        const Eigen::Index nrows = g.dim(src.p + 1, src.q);
        if (nrows > 0) {
            const Mat db = b.delbar(src.p + 1, src.q - 1);
            s.block(row_at, vars.offsets[l], db.rows(), db.cols()) = db;
            if (l == 0)
                rhs.segment(row_at, nrows) = b.del(src) * a;
            else {
                const Mat dl = b.del(src);
                s.block(row_at, vars.offsets[l - 1], dl.rows(), dl.cols()) -= dl;
            }
        }
        row_at += nrows;
    }

    const Vec x = lin::min_norm_solve(s, rhs);
    if (s.rows() > 0) {
        const double res = (s * x - rhs).norm();
        if (res > 1e-8 * scale)
            throw PreconditionError("form is not E_" + std::to_string(r) +
                                    "-closed (tower residual " + std::to_string(res) + ")");
    }

    for (int l = 1; l <= r - 1; ++l) {
        const Bidegree cell{pq.p + l, pq.q - l};
        Form u = b.zero_form(alpha.degree);
        if (g.dim(cell) > 0)
            u.components[cell] = x.segment(vars.offsets[l - 1], g.dim(cell));
        w.u.push_back(std::move(u));
    }
    return w;
}

Mat dr_map(const Bicomplex& b, const PageTable& pg, int p, int q) {
    const int r = pg.r;
    const auto& src = pg.cell(p, q);
    const auto& tgt = pg.cell(p + r, q - r + 1);
    Mat m = Mat::Zero(tgt.dim, src.dim);
    if (src.dim == 0 || tgt.dim == 0) return m;

    for (int j = 0; j < src.dim; ++j) {
        Form alpha = b.zero_form(p + q);
        alpha.components[{p, q}] = src.representatives.col(j);
        const TowerWitness w = tower_witness(b, alpha, r);
        const Form& last = r == 1 ? alpha : w.u.back();
        const Form image = b.apply_del(last);
        if (const Vec* v = image.component({p + r, q - r + 1}))
            m.col(j) = tgt.representatives.adjoint() * (*v);
    }
    return m;
}

Mat dr_map(const Bicomplex& b, int r, int p, int q) { return dr_map(b, page(b, r), p, q); }

Mat theta0_map(const Bicomplex& b, int k) {
    const int r0 = degeneration_page(b);
    const PageTable pg = page(b, r0);
    const auto& cell = pg.cell(0, k);
    const CohomologySpace dr = cohomology(b, CohomologyKind::DeRham, k);
    Mat m = Mat::Zero(cell.dim, dr.dimension);
    for (int j = 0; j < dr.dimension; ++j)
        if (const Vec* v = dr.basis[j].component({0, k}))
            if (cell.dim > 0) m.col(j) = cell.representatives.adjoint() * (*v);
    return m;
}

TypeOneOneResult is_type_one_one(const ExteriorModel& model, const Form& c) {
    const Bicomplex& b = model.bicomplex();
    if (c.degree != 2) throw DomainError("type (1,1) criterion expects a 2-form");
    const double scale = 1.0 + c.norm();
    if ((model.conjugate(c) - c).norm() > 1e-9 * scale)
        throw DomainError("class representative is not real");
    if (b.apply_d_h(c, Cplx(1, 0)).norm() > 1e-9 * scale)
        throw DomainError("class representative is not d-closed");

    const int r0 = degeneration_page(b);
    const PageTable pg = page(b, r0);
    const auto& cell = pg.cell(0, 2);

    Vec c02 = Vec::Zero(b.grading().dim(0, 2));
    if (const Vec* v = c.component({0, 2})) c02 = *v;

    TypeOneOneResult out;
    out.e_infty_02_residual = cell.dim > 0 ? (cell.representatives.adjoint() * c02).norm()
                                           : 0.0;
    out.is_type_one_one = out.e_infty_02_residual <= 1e-8 * scale;
    if (!out.is_type_one_one) return out;

    // Certificate: in bidegree (0,2), E_r-exact means delbar-exact. Solve
    // delbar u01 = c^{0,2}, set u = u01 + conj(u01); then c - du is a
    // d-closed (1,1) representative of the same class.
    const Mat db = b.delbar(0, 1);
    const Vec u01 = lin::min_norm_solve(db, c02);
    Form u = b.zero_form(1);
    u.components[{0, 1}] = u01;
    const Form u_real = u + model.conjugate(u);
    out.certificate = c - b.apply_d_h(u_real, Cplx(1, 0));
    return out;
}

}  // namespace frolicher::spectral
