#include "frolicher/sg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "frolicher/linalg.hpp"

namespace frolicher::sg {

namespace {

constexpr Cplx kI{0.0, 1.0};

Cplx i_power(int p) {
    Cplx r{1, 0};
    for (int j = 0; j < p; ++j) r *= kI;
    return r;
}

double factorial(int m) {
    double r = 1;
    for (int j = 2; j <= m; ++j) r *= j;
    return r;
}

/// Witness solve for del zeta + delbar xi = alpha at (n, n-1) with the
/// level-r side constraint on zeta. Returns the witness and the residual of
/// the reconstruction.
std::pair<spectral::ExactnessWitness, double> solve_witness(const ExteriorModel& model,
                                                            const Vec& alpha, int r) {
    const Bicomplex& bc = model.bicomplex();
    const int n = model.n();
    const Bidegree zeta_cell{n - 1, n - 1};
    const Bidegree xi_cell{n, n - 2};
    const Bidegree v_cell{n - 2, n};

    const int dz = bc.grading().dim(zeta_cell);
    const int dx = bc.grading().dim(xi_cell);
    const int dv = bc.grading().dim(v_cell);

    // admissible zeta directions per level
    Mat zeta_gens(dz, 0);
    Mat v_gens(dv, 0);
    if (r == 2) {
        zeta_gens = lin::kernel(bc.delbar(zeta_cell));
    } else if (r == 3) {
        // (zeta, v) with delbar zeta = del v
        Mat sys(bc.grading().dim(n - 1, n), dz + dv);
        sys << bc.delbar(zeta_cell), -bc.del(v_cell);
        const Mat k = lin::kernel(sys);
        zeta_gens = k.topRows(dz);
        v_gens = k.bottomRows(dv);
    }

    Mat lhs(alpha.size(), zeta_gens.cols() + dx);
    if (zeta_gens.cols() > 0) lhs.leftCols(zeta_gens.cols()) = bc.del(zeta_cell) * zeta_gens;
    lhs.rightCols(dx) = bc.delbar(xi_cell);

    const Vec x = lin::min_norm_solve(lhs, alpha);
    const double residual = lhs.rows() ? (lhs * x - alpha).norm() : alpha.norm();

    spectral::ExactnessWitness w;
    w.zeta = bc.zero_form(2 * n - 2);
    w.xi = bc.zero_form(2 * n - 2);
    if (zeta_gens.cols() > 0)
        w.zeta.components[zeta_cell] = zeta_gens * x.head(zeta_gens.cols());
    w.xi.components[xi_cell] = x.tail(dx);
    if (r == 3) {
        Form v = bc.zero_form(2 * n - 2);
        v.components[v_cell] = v_gens * x.head(zeta_gens.cols());
        w.v.push_back(std::move(v));
    }
    return {std::move(w), residual};
}

}  // namespace

Form metric_form(const ExteriorModel& model, const HermitianMetric& gamma) {
    const int n = model.n();
    if (gamma.g.rows() != n || gamma.g.cols() != n)
        throw StructuralError("metric coefficient matrix must be n x n");
    Form out = model.zero_form(2);
    Vec& c11 = out.components[{1, 1}];
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            Monomial m{{j}, {k}};
            c11[model.monomial_index(m)] += kI * gamma.g(j, k);
        }
    return out;
}

Form power(const ExteriorModel& model, const HermitianMetric& gamma, int m) {
    if (m < 0 || m > model.n())
        throw DomainError("power exponent must satisfy 0 <= m <= n");
    Form acc = model.zero_form(0);
    acc.components[{0, 0}][0] = Cplx(1, 0);
    if (m == 0) return acc;
    const Form g1 = metric_form(model, gamma);
    for (int j = 0; j < m; ++j) acc = model.wedge(acc, g1);
    return acc;
}

void require_positive(const HermitianMetric& gamma) {
    if ((gamma.g - gamma.g.adjoint()).norm() > 1e-10 * (1.0 + gamma.g.norm()))
        throw DomainError("metric coefficient matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(gamma.g);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig <= 0.0)
        throw DomainError("metric is not positive definite (smallest eigenvalue " +
                          std::to_string(min_eig) + ")");
}

bool is_gauduchon(const ExteriorModel& model, const HermitianMetric& gamma) {
    require_positive(gamma);
    const Bicomplex& bc = model.bicomplex();
    const Form p = power(model, gamma, model.n() - 1);
    const Form ddbar = bc.apply_del(bc.apply_delbar(p));
    return ddbar.norm() <= 1e-9 * (1.0 + p.norm());
}

SGReport sg_level(const ExteriorModel& model, const HermitianMetric& gamma) {
    if (!is_gauduchon(model, gamma))
        throw PreconditionError("sg_level requires a Gauduchon metric");
    const Bicomplex& bc = model.bicomplex();
    const int n = model.n();

    SGReport report;
    report.gauduchon = true;

    const Form p = power(model, gamma, n - 1);
    const Form alpha_form = bc.apply_del(p);
    Vec alpha = Vec::Zero(bc.grading().dim(n, n - 1));
    if (const Vec* v = alpha_form.component({n, n - 1})) alpha = *v;
    report.partial_norm = alpha.norm();

    const double tol = 1e-8 * (1.0 + p.norm());
    for (int r = 1; r <= 3; ++r) {
        const Mat exact = spectral::er_exact_space(bc, n, n - 1, r);
        const double member = (alpha - lin::projector(exact) * alpha).norm();
        if (member > tol) continue;
        auto [witness, residual] = solve_witness(model, alpha, r);
        // re-validate: reconstruction and the side constraint
        double side = 0.0;
        if (r >= 2) {
            Form constraint = bc.apply_delbar(witness.zeta);
            if (r == 3) constraint -= bc.apply_del(witness.v.front());
            side = constraint.norm();
        }
        if (residual <= tol && side <= tol) {
            report.sg_level = r;
            report.witness_residual = residual;
            report.witness = std::move(witness);
            break;
        }
    }
    return report;
}

HermitianMetric root_n_minus_1(const ExteriorModel& model, const Form& omega) {
    const int n = model.n();
    if (n < 2) throw DomainError("the (n-1)-st root needs n >= 2");
    if (omega.degree != 2 * (n - 1))
        throw DomainError("root input must be an (n-1,n-1)-form");
    const Bidegree cell{n - 1, n - 1};
    Vec target = Vec::Zero(model.bicomplex().grading().dim(cell));
    if (const Vec* v = omega.component(cell)) target = *v;

    // init: coefficient-wise (n-1)-st root of the diagonal of the associated
    // matrix of omega
    const double sign = ((n - 1) * (n - 2) / 2) % 2 == 0 ? 1.0 : -1.0;
    const Cplx denom = i_power(n - 1) * factorial(n - 1) * sign;
    Mat g = Mat::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        std::vector<int> rest;
        for (int m = 0; m < n; ++m)
            if (m != j) rest.push_back(m);
        Monomial diag{rest, rest};
        const double aj = std::real(target[model.monomial_index(diag)] / denom);
        g(j, j) = std::pow(std::max(aj, 1e-8), 1.0 / (n - 1));
    }

    const double scale = 1.0 + target.norm();
    const Bidegree one_one{1, 1};
    const int d11 = model.bicomplex().grading().dim(one_one);

    auto residual_of = [&](const Mat& candidate) {
        const Form pw = power(model, HermitianMetric{candidate}, n - 1);
        Vec f = Vec::Zero(target.size());
        if (const Vec* v = pw.component(cell)) f = *v;
        f -= target;
        return f;
    };

    // iterates are clamped to the positive cone, where the power map stays
    // regular
    auto clamp_positive = [&](Mat candidate) {
        candidate = (candidate + candidate.adjoint()) / 2.0;
        Eigen::SelfAdjointEigenSolver<Mat> es(candidate);
        RealVec ev = es.eigenvalues();
        const double floor = 1e-6 * std::max(1.0, ev.maxCoeff());
        for (Eigen::Index j = 0; j < ev.size(); ++j) ev[j] = std::max(ev[j], floor);
        return Mat(es.eigenvectors() * ev.asDiagonal().toDenseMatrix().cast<Cplx>() *
                   es.eigenvectors().adjoint());
    };

    std::string trace;
    Vec f = residual_of(g);
    double lambda = 0.0;  // Levenberg-Marquardt safeguard for singular Jacobians
    for (int iter = 0; iter < 100; ++iter) {
        trace += (iter ? " " : "") + std::to_string(f.norm());
        if (f.norm() <= 1e-10 * scale) {
            g = (g + g.adjoint()) / 2.0;
            HermitianMetric result{g};
            require_positive(result);
            return result;
        }

        // Jacobian of gamma -> gamma^{n-1}: wedging with (n-1) gamma^{n-2}
        const Form base = power(model, HermitianMetric{g}, n - 2);
        Mat jac(target.size(), d11);
        for (int m = 0; m < d11; ++m) {
            Form e = model.zero_form(2);
            e.components[one_one][m] = Cplx(1, 0);
            const Form col = model.wedge(base, e);
            Vec cv = Vec::Zero(target.size());
            if (const Vec* v = col.component(cell)) cv = *v;
            jac.col(m) = static_cast<double>(n - 1) * cv;
        }

        bool improved = false;
        for (int attempt = 0; attempt < 10 && !improved; ++attempt) {
            Vec delta;
            if (lambda == 0.0) {
                delta = lin::min_norm_solve(jac, Vec(-f));
            } else {
                const Mat normal =
                    jac.adjoint() * jac + lambda * Mat::Identity(d11, d11);
                delta = normal.llt().solve(Vec(-(jac.adjoint() * f)));
            }
            Mat step = Mat::Zero(n, n);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    step(j, k) = delta[model.monomial_index(Monomial{{j}, {k}})] / kI;

            double s = 1.0;
            for (int half = 0; half < 12 && !improved; ++half, s /= 2) {
                const Mat candidate = clamp_positive(g + s * step);
                const Vec cf = residual_of(candidate);
                if (cf.norm() < f.norm() * (1.0 - 1e-12)) {
                    g = candidate;
                    f = cf;
                    improved = true;
                }
            }
            if (improved)
                lambda = lambda > 1e-10 ? lambda / 10.0 : 0.0;
            else
                lambda = std::max(lambda * 10.0, 1e-6);
        }
        if (!improved) break;
    }
    throw Error("no (n-1)-st root found within 100 Newton steps; residual trace: " + trace);
}

FamilySGReport family_sg_scan(const FamilySpec& fam, const HermitianMetric& gamma0,
                              const std::vector<Cplx>& t_grid) {
    const ExteriorModel model0 = ExteriorModel::build(family_at(fam, Cplx(0, 0)));
    if (!is_gauduchon(model0, gamma0))
        throw PreconditionError("family_sg_scan requires gamma_0 Gauduchon at t = 0");

    const SGReport base = sg_level(model0, gamma0);
    const int n = model0.n();
    const int r = base.sg_level;

    Form zeta0 = model0.zero_form(2 * n - 2);
    Form v0 = model0.zero_form(2 * n - 2);
    if (base.witness) {
        zeta0 = base.witness->zeta;
        if (!base.witness->v.empty()) v0 = base.witness->v.front();
    }

    // fixed real (2n-2)-form data transported across the family
    const Form omega_fixed =
        power(model0, gamma0, n - 1) - zeta0 - model0.conjugate(zeta0);

    const Bidegree zeta_cell{n - 1, n - 1};
    const Bidegree v_cell{n - 2, n};

    FamilySGReport report;
    report.level_at_zero = r;
    for (Cplx t : t_grid) {
        FamilySGPoint point;
        point.t = t;
        try {
            const ExteriorModel model = ExteriorModel::build(family_at(fam, t));
            const Bicomplex& bc = model.bicomplex();
            const int dz = bc.grading().dim(zeta_cell);
            const int dv = bc.grading().dim(v_cell);

            // re-solve the potentials at t: project (zeta0, v0) onto the
            // t-constraint space
            Vec zeta_t = Vec::Zero(dz);
            const Vec z0 = zeta0.component(zeta_cell) ? *zeta0.component(zeta_cell)
                                                      : Vec(Vec::Zero(dz));
            if (r == 2) {
                const Mat k = lin::kernel(bc.delbar(zeta_cell));
                zeta_t = k * (k.adjoint() * z0);
            } else if (r == 3) {
                Mat sys(bc.grading().dim(n - 1, n), dz + dv);
                sys << bc.delbar(zeta_cell), -bc.del(v_cell);
                const Mat k = lin::kernel(sys);
                Vec x0(dz + dv);
                x0.head(dz) = z0;
                x0.tail(dv) = v0.component(v_cell) ? *v0.component(v_cell)
                                                   : Vec(Vec::Zero(dv));
                const Vec proj = k * (k.adjoint() * x0);
                zeta_t = proj.head(dz);
            }

            Form zeta_form = bc.zero_form(2 * n - 2);
            zeta_form.components[zeta_cell] = zeta_t;
            const Form candidate = omega_fixed + zeta_form + model.conjugate(zeta_form);

            const HermitianMetric gamma_t = root_n_minus_1(model, candidate);
            point.positive = true;
            {
                Vec cv = Vec::Zero(bc.grading().dim(zeta_cell));
                if (const Vec* v = candidate.component(zeta_cell)) cv = *v;
                Vec pv = Vec::Zero(bc.grading().dim(zeta_cell));
                const Form pw = power(model, gamma_t, n - 1);
                if (const Vec* v = pw.component(zeta_cell)) pv = *v;
                point.root_residual = (pv - cv).norm();
            }
            point.gauduchon = is_gauduchon(model, gamma_t);
            if (point.gauduchon) point.sg_level = sg_level(model, gamma_t).sg_level;
            point.ok = true;
        } catch (const Error& e) {
            point.ok = false;
            point.error = e.what();
        }
        if (!report.first_failure && (!point.ok || !point.positive || !point.gauduchon))
            report.first_failure = report.points.size();
        report.points.push_back(std::move(point));
    }
    return report;
}

}  // namespace frolicher::sg
