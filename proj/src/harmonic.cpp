#include "frolicher/harmonic.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <functional>

#include "frolicher/linalg.hpp"
#include "frolicher/parallel.hpp"

namespace frolicher::harmonic {

namespace {

/// Assembles a degree k_src -> k_tgt operator from per-cell blocks.
Mat assemble(const Bigrading& g, int k_src, int k_tgt,
             const std::function<std::vector<std::pair<Bidegree, Mat>>(Bidegree)>& blocks) {
    const auto src = g.cells_of_degree(k_src);
    const auto tgt = g.cells_of_degree(k_tgt);
    std::map<Bidegree, Eigen::Index> tgt_offset;
    Eigen::Index at = 0;
    for (const auto& [pq, d] : tgt) {
        tgt_offset[pq] = at;
        at += d;
    }
    Mat out = Mat::Zero(g.total_dim(k_tgt), g.total_dim(k_src));
    Eigen::Index col = 0;
    for (const auto& [pq, d] : src) {
        for (const auto& [tcell, block] : blocks(pq)) {
            auto it = tgt_offset.find(tcell);
            if (it == tgt_offset.end() || block.rows() == 0 || block.cols() == 0) continue;
            out.block(it->second, col, block.rows(), block.cols()) += block;
        }
        col += d;
    }
    return out;
}

Mat projector_of(const Mat& basis) { return lin::projector(basis); }

}  // namespace

Mat adjoint(const MetricData& m, const Bigrading& g, const Mat& op, Bidegree src,
            Bidegree tgt) {
    if (op.rows() != g.dim(tgt) || op.cols() != g.dim(src))
        throw StructuralError("operator shape does not match the bidegrees " +
                              to_string(src) + " -> " + to_string(tgt));
    auto gram = [&](Bidegree pq) -> Mat {
        auto it = m.gram.find(pq);
        if (it == m.gram.end()) return Mat::Identity(g.dim(pq), g.dim(pq));
        if (it->second.rows() != g.dim(pq) || it->second.cols() != g.dim(pq))
            throw StructuralError("Gram matrix shape mismatch at " + to_string(pq));
        return it->second;
    };
    const Mat g_src = gram(src);
    const Mat g_tgt = gram(tgt);
    return g_src.llt().solve(Mat(op.adjoint() * g_tgt));
}

Hodge::Hodge(Bicomplex b) : ortho_(std::move(b)) {}

Hodge::Hodge(Bicomplex b, const MetricData& m) {
    if (m.gram.empty()) {
        ortho_ = std::move(b);
        return;
    }
    identity_ = false;
    const Bigrading& g = b.grading();
    const int n = g.n();
    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            const Bidegree pq{p, q};
            const int d = g.dim(pq);
            if (d == 0) continue;
            auto it = m.gram.find(pq);
            if (it == m.gram.end()) {
                chol_[pq] = Mat::Identity(d, d);
                chol_inv_[pq] = Mat::Identity(d, d);
                continue;
            }
            if (it->second.rows() != d || it->second.cols() != d)
                throw StructuralError("Gram matrix shape mismatch at " + to_string(pq));
            Eigen::LLT<Mat> llt(it->second);
            if (llt.info() != Eigen::Success)
                throw StructuralError("Gram matrix is not positive definite at " +
                                      to_string(pq));
            const Mat c = llt.matrixU();  // G = C^H C
            chol_[pq] = c;
            chol_inv_[pq] = c.inverse();
        }
    std::map<Bidegree, Mat> del, delbar;
    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            const Bidegree pq{p, q};
            if (g.dim(pq) == 0) continue;
            if (g.dim(p + 1, q) > 0)
                del[pq] = chol_.at({p + 1, q}) * b.del(pq) * chol_inv_.at(pq);
            if (g.dim(p, q + 1) > 0)
                delbar[pq] = chol_.at({p, q + 1}) * b.delbar(pq) * chol_inv_.at(pq);
        }
    ortho_ = Bicomplex(g, std::move(del), std::move(delbar));
}

Form Hodge::to_ortho(const Form& u) const {
    if (identity_) return u;
    Form out = u;
    for (auto& [pq, v] : out.components)
        if (auto it = chol_.find(pq); it != chol_.end()) v = it->second * v;
    return out;
}

Form Hodge::from_ortho(const Form& u) const {
    if (identity_) return u;
    Form out = u;
    for (auto& [pq, v] : out.components)
        if (auto it = chol_inv_.find(pq); it != chol_inv_.end()) v = it->second * v;
    return out;
}

Mat Hodge::conj_matrix(const ExteriorModel& model, Bidegree pq) const {
    const Mat s = model.conjugation_matrix(pq);
    if (identity_ || s.rows() == 0 || s.cols() == 0) return s;
    return chol_.at({pq.q, pq.p}) * s * chol_inv_.at(pq).conjugate();
}

// ---------------------------------------------------------------------------

Mat delta_bar(const Hodge& h, Bidegree pq) {
    const Mat down = h.ortho().delbar(pq);
    const Mat up = h.ortho().delbar(pq.p, pq.q - 1);
    return down.adjoint() * down + up * up.adjoint();
}

Mat delta_prime(const Hodge& h, Bidegree pq) {
    const Mat down = h.ortho().del(pq);
    const Mat up = h.ortho().del(pq.p - 1, pq.q);
    return down.adjoint() * down + up * up.adjoint();
}

Mat laplacian_h(const Hodge& hm, Cplx h, int k) {
    const Mat down = d_h_total(hm.ortho(), h, k);
    Mat lap = down.adjoint() * down;
    if (k > 0) {
        const Mat up = d_h_total(hm.ortho(), h, k - 1);
        lap += up * up.adjoint();
    }
    return lap;
}

Mat tilde_laplacian_2_h(const Hodge& hm, Cplx h, int k) {
    const Bigrading& g = hm.grading();
    const Bicomplex& bc = hm.ortho();

    std::map<Bidegree, Mat> p2bar, p1bar;  // projectors onto ker Delta'' / ker Delta'
    auto proj_bar = [&](Bidegree pq) -> const Mat& {
        auto it = p2bar.find(pq);
        if (it == p2bar.end())
            it = p2bar.emplace(pq, projector_of(lin::hermitian_kernel(delta_bar(hm, pq)))).first;
        return it->second;
    };
    auto proj_prime = [&](Bidegree pq) -> const Mat& {
        auto it = p1bar.find(pq);
        if (it == p1bar.end())
            it = p1bar.emplace(pq, projector_of(lin::hermitian_kernel(delta_prime(hm, pq)))).first;
        return it->second;
    };

    // (del p'' + h delbar p') from degree k-1 into k
    Mat t1;
    if (k > 0)
        t1 = assemble(g, k - 1, k, [&](Bidegree pq) {
            std::vector<std::pair<Bidegree, Mat>> out;
            out.push_back({{pq.p + 1, pq.q}, Mat(bc.del(pq) * proj_bar(pq))});
            out.push_back({{pq.p, pq.q + 1}, Mat(h * bc.delbar(pq) * proj_prime(pq))});
            return out;
        });
    else
        t1 = Mat::Zero(g.total_dim(k), 0);

    // (p'' del + h p' delbar) from degree k into k+1
    Mat t2 = assemble(g, k, k + 1, [&](Bidegree pq) {
        std::vector<std::pair<Bidegree, Mat>> out;
        out.push_back({{pq.p + 1, pq.q}, Mat(proj_bar({pq.p + 1, pq.q}) * bc.del(pq))});
        out.push_back({{pq.p, pq.q + 1},
                       Mat(h * proj_prime({pq.p, pq.q + 1}) * bc.delbar(pq))});
        return out;
    });

    return t1 * t1.adjoint() + t2.adjoint() * t2 + laplacian_h(hm, h, k);
}

// ---------------------------------------------------------------------------

Mat HarmonicTower::basis(int level, Bidegree pq) const {
    const auto& table = h_basis.at(level);
    auto it = table.find(pq);
    if (it == table.end()) return Mat(0, 0);
    return it->second;
}

Mat HarmonicTower::projector(int level, Bidegree pq) const {
    return lin::projector(basis(level, pq));
}

int HarmonicTower::dim(int level, Bidegree pq) const {
    return static_cast<int>(basis(level, pq).cols());
}

HarmonicTower harmonic_tower(const Hodge& hm, int r_max) {
    if (r_max < 1) throw DomainError("tower depth must be >= 1");
    const Bigrading& g = hm.grading();
    const Bicomplex& bc = hm.ortho();
    const int n = g.n();

    HarmonicTower tw;
    tw.r_max = std::min(r_max, n + 1);
    tw.clamped = r_max > n + 1;

    tw.h_basis.resize(tw.r_max + 1);
    tw.tilde_delta.resize(tw.r_max + 1);
    tw.green.resize(tw.r_max + 1);
    tw.transfer.resize(tw.r_max);  // D_j for j = 0..r_max-1
    tw.d_omega.resize(tw.r_max + 1);
    tw.d_omega_cell.resize(tw.r_max + 1);

    auto cells = [&]() {
        std::vector<Bidegree> out;
        for (int p = 0; p <= n; ++p)
            for (int q = 0; q <= n; ++q)
                if (g.dim(p, q) > 0) out.push_back({p, q});
        return out;
    }();

    auto at = [&](const std::map<Bidegree, Mat>& table, Bidegree pq, int rows,
                  int cols) -> Mat {
        auto it = table.find(pq);
        return it == table.end() ? Mat::Zero(rows, cols) : it->second;
    };

    // level 1: Delta''
    for (Bidegree pq : cells) {
        tw.tilde_delta[1][pq] = delta_bar(hm, pq);
        tw.h_basis[1][pq] = lin::hermitian_kernel(tw.tilde_delta[1][pq]);
        tw.green[1][pq] = lin::green_inverse(tw.tilde_delta[1][pq]);
        tw.transfer[0][pq] = Mat::Identity(g.dim(pq), g.dim(pq));
    }
    for (Bidegree pq : cells) {
        const Bidegree tgt{pq.p + 1, pq.q};
        tw.d_omega[1][pq] =
            tw.projector(1, tgt) * bc.del(pq) * tw.projector(1, pq);
        tw.d_omega_cell[1][pq] =
            tw.basis(1, tgt).adjoint() * bc.del(pq) * tw.basis(1, pq);
    }

    for (int j = 1; j + 1 <= tw.r_max; ++j) {
        // D_j(p,q) = D_{j-1}(p+1,q-1) * G_j(p+1,q-1) * delbar^* * del
        if (j < static_cast<int>(tw.transfer.size()))
            for (Bidegree pq : cells) {
                const Bidegree mid{pq.p + 1, pq.q - 1};
                if (g.dim(mid) == 0) {
                    tw.transfer[j][pq] =
                        Mat::Zero(g.dim(pq.p + j, pq.q - j), g.dim(pq));
                    continue;
                }
                const Mat f = at(tw.green[j], mid, g.dim(mid), g.dim(mid)) *
                              bc.delbar(mid).adjoint() * bc.del(pq);
                const Mat d_prev = at(tw.transfer[j - 1], mid,
                                      g.dim(mid.p + j - 1, mid.q - j + 1), g.dim(mid));
                tw.transfer[j][pq] = d_prev * f;
            }

        // Delta-tilde^(j+1) = A A^* + B^* B + Delta-tilde^(j)
        for (Bidegree pq : cells) {
            const Bidegree a_src{pq.p - j, pq.q + j - 1};
            Mat a = Mat::Zero(g.dim(pq), g.dim(a_src));
            if (g.dim(a_src) > 0) {
                const Mat d_tr = at(tw.transfer[j - 1], a_src, g.dim(pq.p - 1, pq.q),
                                    g.dim(a_src));
                a = bc.del(pq.p - 1, pq.q) * d_tr * tw.projector(j, a_src);
            }
            const Bidegree b_tgt{pq.p + j, pq.q - j + 1};
            Mat bop = Mat::Zero(g.dim(b_tgt), g.dim(pq));
            if (g.dim(b_tgt) > 0) {
                const Mat d_tr = at(tw.transfer[j - 1], pq,
                                    g.dim(pq.p + j - 1, pq.q - j + 1), g.dim(pq));
                bop = tw.projector(j, b_tgt) * bc.del(pq.p + j - 1, pq.q - j + 1) * d_tr;
            }
            tw.tilde_delta[j + 1][pq] =
                a * a.adjoint() + bop.adjoint() * bop + tw.tilde_delta[j][pq];
            tw.h_basis[j + 1][pq] = lin::hermitian_kernel(tw.tilde_delta[j + 1][pq]);
            tw.green[j + 1][pq] = lin::green_inverse(tw.tilde_delta[j + 1][pq]);
        }

        // d_{j+1} = p_{j+1} del D_j p_{j+1}
        for (Bidegree pq : cells) {
            const Bidegree tgt{pq.p + j + 1, pq.q - j};
            const Mat d_tr =
                at(tw.transfer[j], pq, g.dim(pq.p + j, pq.q - j), g.dim(pq));
            if (g.dim(tgt) == 0 || g.dim(pq.p + j, pq.q - j) == 0) {
                tw.d_omega[j + 1][pq] = Mat::Zero(g.dim(tgt), g.dim(pq));
                tw.d_omega_cell[j + 1][pq] =
                    Mat::Zero(tw.dim(j + 1, tgt), tw.dim(j + 1, pq));
                continue;
            }
            const Mat core = bc.del(pq.p + j, pq.q - j) * d_tr;
            tw.d_omega[j + 1][pq] = tw.projector(j + 1, tgt) * core * tw.projector(j + 1, pq);
            tw.d_omega_cell[j + 1][pq] =
                tw.basis(j + 1, tgt).adjoint() * core * tw.basis(j + 1, pq);
        }
    }
    return tw;
}

// ---------------------------------------------------------------------------

Mat tilde_laplacian_r_h(const Hodge& hm, const HarmonicTower& tower,
                        const ExteriorModel* model, int r, Cplx h, int k) {
    if (r < 1) throw DomainError("page index r must be >= 1");
    if (r == 1) return laplacian_h(hm, h, k);
    if (r == 2) return tilde_laplacian_2_h(hm, h, k);
    if (!model)
        throw CapabilityError(
            "Delta-tilde^(r)_h with r >= 3 needs the model conjugation; an abstract "
            "bicomplex does not carry one");
    if (tower.r_max < r - 1)
        throw DomainError("harmonic tower depth " + std::to_string(tower.r_max) +
                          " is insufficient for r = " + std::to_string(r));

    const Bigrading& g = hm.grading();
    const Bicomplex& bc = hm.ortho();

    auto conj_of = [&](const Mat& m, Bidegree src_mirror, Bidegree tgt_mirror) -> Mat {
        // kappa o M o kappa for M : src_mirror -> tgt_mirror
        const Mat r_in = hm.conj_matrix(*model, {src_mirror.q, src_mirror.p});
        const Mat r_out = hm.conj_matrix(*model, tgt_mirror);
        return r_out * m.conjugate() * r_in.conjugate();
    };

    auto transfer_at = [&](int j, Bidegree pq) -> Mat {
        auto it = tower.transfer[j].find(pq);
        if (it != tower.transfer[j].end()) return it->second;
        return Mat::Zero(g.dim(pq.p + j, pq.q - j), g.dim(pq));
    };

    Mat lap = tilde_laplacian_2_h(hm, h, k);
    for (int j = 2; j <= r - 1; ++j) {
        // conjugated projection and transfer per bidegree
        auto p_bar = [&](Bidegree pq) -> Mat {
            const Mat p = tower.projector(j, {pq.q, pq.p});
            return conj_of(p, {pq.q, pq.p}, {pq.q, pq.p});
        };
        auto d_bar = [&](Bidegree pq) -> Mat {
            // conj of D_{j-1} at the mirrored cell: (p,q) -> (p-j+1, q+j-1)
            const Mat d = transfer_at(j - 1, {pq.q, pq.p});
            return conj_of(d, {pq.q, pq.p}, {pq.q + j - 1, pq.p - j + 1});
        };

        // T1: (del D_{j-1} p_j + h delbar conj(D_{j-1}) conj(p_j)) from k-1 to k
        Mat t1;
        if (k > 0)
            t1 = assemble(g, k - 1, k, [&](Bidegree pq) {
                std::vector<std::pair<Bidegree, Mat>> out;
                const Bidegree hol_tgt{pq.p + j, pq.q - j + 1};
                if (g.dim(hol_tgt) > 0 && g.dim(pq.p + j - 1, pq.q - j + 1) > 0)
                    out.push_back({hol_tgt, Mat(bc.del(pq.p + j - 1, pq.q - j + 1) *
                                                transfer_at(j - 1, pq) *
                                                tower.projector(j, pq))});
                const Bidegree anti_tgt{pq.p - j + 1, pq.q + j};
                if (g.dim(anti_tgt) > 0 && g.dim(pq.p - j + 1, pq.q + j - 1) > 0)
                    out.push_back({anti_tgt, Mat(h * bc.delbar(pq.p - j + 1, pq.q + j - 1) *
                                                 d_bar(pq) * p_bar(pq))});
                return out;
            });
        else
            t1 = Mat::Zero(g.total_dim(k), 0);

        // T2: (p_j del D_{j-1} + h conj(p_j) delbar conj(D_{j-1})) from k to k+1
        Mat t2 = assemble(g, k, k + 1, [&](Bidegree pq) {
            std::vector<std::pair<Bidegree, Mat>> out;
            const Bidegree hol_tgt{pq.p + j, pq.q - j + 1};
            if (g.dim(hol_tgt) > 0 && g.dim(pq.p + j - 1, pq.q - j + 1) > 0)
                out.push_back({hol_tgt, Mat(tower.projector(j, hol_tgt) *
                                            bc.del(pq.p + j - 1, pq.q - j + 1) *
                                            transfer_at(j - 1, pq))});
            const Bidegree anti_tgt{pq.p - j + 1, pq.q + j};
            if (g.dim(anti_tgt) > 0 && g.dim(pq.p - j + 1, pq.q + j - 1) > 0)
                out.push_back({anti_tgt, Mat(h * p_bar(anti_tgt) *
                                             bc.delbar(pq.p - j + 1, pq.q + j - 1) *
                                             d_bar(pq))});
            return out;
        });

        lap = t1 * t1.adjoint() + t2.adjoint() * t2 + lap;
    }
    return lap;
}

// ---------------------------------------------------------------------------

spectral::TowerWitness neumann_tower(const Hodge& hm, const HarmonicTower& tower,
                                     const Form& alpha, int r) {
    const Bigrading& g = hm.grading();
    const Bicomplex& bc = hm.ortho();
    const Form alpha_o = hm.to_ortho(alpha);

    Bidegree pq{-1, -1};
    for (const auto& [cell, v] : alpha_o.components)
        if (v.norm() > 1e-13 * (1.0 + alpha_o.norm())) {
            if (pq.p >= 0) throw DomainError("pure-type form expected");
            pq = cell;
        }
    spectral::TowerWitness out;
    out.alpha = alpha;
    if (pq.p < 0) {
        for (int l = 1; l <= r - 1; ++l) out.u.push_back(bc.zero_form(alpha.degree));
        return out;
    }
    if (tower.r_max < r - 1 && r >= 2)
        throw DomainError("harmonic tower depth insufficient for r = " + std::to_string(r));

    const Mat z = spectral::er_closed_space(bc, pq.p, pq.q, r);
    const Vec a = *alpha_o.component(pq);
    const double residual = (a - lin::projector(z) * a).norm();
    if (residual > 1e-8 * (1.0 + a.norm()))
        throw PreconditionError("form is not E_" + std::to_string(r) +
                                "-closed (membership residual " + std::to_string(residual) +
                                ")");

    Vec current = a;
    Bidegree cell = pq;
    for (int l = 1; l <= r - 1; ++l) {
        const Bidegree next{cell.p + 1, cell.q - 1};
        Form u = bc.zero_form(alpha.degree);
        if (g.dim(next) > 0) {
            const Mat green = [&]() -> Mat {
                auto it = tower.green[r - l].find(next);
                if (it != tower.green[r - l].end()) return it->second;
                return Mat::Zero(g.dim(next), g.dim(next));
            }();
            const Vec ul = green * bc.delbar(next).adjoint() * bc.del(cell) * current;
            u.components[next] = ul;
            current = ul;
        } else {
            current = Vec::Zero(0);
        }
        cell = next;
        out.u.push_back(hm.from_ortho(u));
    }
    return out;
}

Mat ThreeSpaceDecomposition::kernel_projector() const { return lin::projector(kernel_basis); }
Mat ThreeSpaceDecomposition::image_projector() const { return lin::projector(image_basis); }
Mat ThreeSpaceDecomposition::coimage_projector() const {
    return lin::projector(coimage_basis);
}

ThreeSpaceDecomposition three_space_decomposition(const Hodge& hm,
                                                  const HarmonicTower& tower, int r,
                                                  int p, int q) {
    if (r < 0) throw DomainError("decomposition level must be >= 0");
    if (tower.r_max < r + 1)
        throw DomainError("harmonic tower depth insufficient for level r = " +
                          std::to_string(r));
    const Bigrading& g = hm.grading();
    const Bicomplex& bc = hm.ortho();
    const Bidegree pq{p, q};

    ThreeSpaceDecomposition out;
    out.kernel_basis = tower.basis(r + 1, pq);

    std::vector<Mat> image_blocks;
    image_blocks.push_back(bc.delbar(p, q - 1));
    for (int j = 1; j <= r; ++j) {
        const Bidegree src{p - j, q + j - 1};
        if (g.dim(src) == 0) continue;
        auto it = tower.transfer[j - 1].find(src);
        const Mat d_tr = it != tower.transfer[j - 1].end()
                             ? it->second
                             : Mat::Zero(g.dim(p - 1, q), g.dim(src));
        image_blocks.push_back(bc.del(p - 1, q) * d_tr * tower.projector(j, src));
    }
    out.image_basis = lin::span_union(image_blocks);

    std::vector<Mat> coimage_blocks;
    coimage_blocks.push_back(bc.delbar(p, q).adjoint());
    for (int j = 1; j <= r; ++j) {
        const Bidegree tgt{p + j, q - j + 1};
        if (g.dim(tgt) == 0) continue;
        auto it = tower.transfer[j - 1].find(pq);
        const Mat d_tr = it != tower.transfer[j - 1].end()
                             ? it->second
                             : Mat::Zero(g.dim(p + j - 1, q - j + 1), g.dim(pq));
        const Mat b_op = tower.projector(j, tgt) * bc.del(p + j - 1, q - j + 1) * d_tr;
        coimage_blocks.push_back(b_op.adjoint());
    }
    out.coimage_basis = lin::span_union(coimage_blocks);
    return out;
}

// ---------------------------------------------------------------------------

std::vector<Cplx> default_h_grid() {
    std::vector<Cplx> grid{{0, 0}};
    for (int j = 0; j <= 6; ++j) {
        const double m = std::ldexp(1.0, -j);
        grid.push_back({m, 0});
        grid.push_back({-m, 0});
        grid.push_back({0, m});
        grid.push_back({0, -m});
    }
    return grid;
}

FavbScanReport favb_scan(const Hodge& hm, const HarmonicTower& tower,
                         const ExteriorModel* model, int k, int r,
                         std::vector<Cplx> h_grid, int jobs) {
    const bool has_zero =
        std::any_of(h_grid.begin(), h_grid.end(), [](Cplx h) { return h == Cplx(0, 0); });
    if (!has_zero) h_grid.insert(h_grid.begin(), Cplx(0, 0));

    FavbScanReport report;
    report.k = k;
    report.r = r;
    report.betti = betti(hm.ortho(), k);

    report.points.resize(h_grid.size());
    parallel_for_ordered(h_grid.size(), jobs, [&](std::size_t i) {
        const Cplx h = h_grid[i];
        const Mat lap = tilde_laplacian_r_h(hm, tower, model, r, h, k);
        const auto spec = lin::hermitian_spectrum(lap);
        FavbPoint point;
        point.h = h;
        point.kernel_dim = spec.kernel_dim;
        const Eigen::Index dim = spec.eigenvalues.size();
        point.lambda_bk = report.betti >= 1 && report.betti <= dim
                              ? spec.eigenvalues[report.betti - 1]
                              : 0.0;
        if (report.betti < dim) point.lambda_bk_plus_1 = spec.eigenvalues[report.betti];
        report.points[i] = point;
    });

    report.rank_constant = true;
    bool nonzero_match = true;
    bool zero_match = true;
    for (const auto& pt : report.points) {
        if (pt.kernel_dim != report.betti) {
            report.rank_constant = false;
            (pt.h == Cplx(0, 0) ? zero_match : nonzero_match) = false;
        }
    }
    report.jump_at_zero = !zero_match && nonzero_match;
    return report;
}

FamilyScanReport family_scan(const FamilySpec& fam, int k, std::vector<Cplx> h_grid,
                             const std::vector<Cplx>& t_grid, int jobs) {
    const bool has_zero =
        std::any_of(h_grid.begin(), h_grid.end(), [](Cplx h) { return h == Cplx(0, 0); });
    if (!has_zero) h_grid.insert(h_grid.begin(), Cplx(0, 0));

    FamilyScanReport report;
    report.k = k;

    struct FibreData {
        std::vector<FamilyPoint> points;
        std::map<Bidegree, int> hodge;
        int betti_k = 0;
    };
    std::vector<FibreData> fibres(t_grid.size());

    parallel_for_ordered(t_grid.size(), jobs, [&](std::size_t ti) {
        const Cplx t = t_grid[ti];
        StructureSpec spec;
        try {
            spec = family_at(fam, t);
        } catch (const DomainError& e) {
            throw DomainError("family point t = (" + std::to_string(t.real()) + "," +
                              std::to_string(t.imag()) + "): " + e.what());
        }
        ExteriorModel model = [&] {
            try {
                return ExteriorModel::build(spec);
            } catch (const StructuralError& e) {
                throw DomainError("family point t = (" + std::to_string(t.real()) + "," +
                                  std::to_string(t.imag()) + ") is not integrable: " +
                                  e.what());
            }
        }();
        const Bicomplex& bc = model.bicomplex();
        const Hodge hodge{bc};

        const int degen = spectral::degeneration_page(bc);
        const auto e_dims = spectral::page_dims(bc, degen);
        int degen_total = 0;
        for (const auto& [pq, d] : e_dims)
            if (pq.p + pq.q == k) degen_total += d;

        FibreData& data = fibres[ti];
        data.betti_k = betti(bc, k);
        const auto e1_dims = spectral::page_dims(bc, 1);
        for (const auto& [pq, d] : e1_dims) data.hodge[pq] = d;

        for (Cplx h : h_grid) {
            FamilyPoint point;
            point.t = t;
            point.h = h;
            point.degen_page = degen;
            if (h == Cplx(0, 0)) {
                point.kernel_dim = degen_total;
            } else {
                const auto spec_h = lin::hermitian_spectrum(laplacian_h(hodge, h, k));
                point.kernel_dim = spec_h.kernel_dim;
            }
            data.points.push_back(point);
        }
    });

    std::map<Bidegree, int> hodge_at_zero;
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti)
        if (t_grid[ti] == Cplx(0, 0)) hodge_at_zero = fibres[ti].hodge;

    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        if (ti == 0) report.betti = fibres[ti].betti_k;
        for (const auto& point : fibres[ti].points) {
            if (point.kernel_dim != report.betti) report.fibre_rank_constant = false;
            report.points.push_back(point);
        }
        if (!hodge_at_zero.empty() && t_grid[ti] != Cplx(0, 0))
            for (const auto& [pq, d] : fibres[ti].hodge)
                if (hodge_at_zero.count(pq) && hodge_at_zero.at(pq) < d)
                    report.hodge_upper_semicontinuous = false;
    }
    return report;
}

}  // namespace frolicher::harmonic
