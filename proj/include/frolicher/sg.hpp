#pragma once

#include <optional>
#include <string>
#include <vector>

#include "frolicher/models.hpp"
#include "frolicher/spectral.hpp"

namespace frolicher::sg {

/// Invariant Hermitian metric gamma = i sum g_{jk} phi^j ^ phibar^k.
struct HermitianMetric {
    Mat g;  // n x n, Hermitian positive definite
};

/// The metric as a (1,1)-form.
Form metric_form(const ExteriorModel& model, const HermitianMetric& gamma);

/// m-fold wedge power of the metric form (m = 0 gives the unit 0-form).
Form power(const ExteriorModel& model, const HermitianMetric& gamma, int m);

/// Checks Hermitian positive definiteness; DomainError carries the smallest
/// eigenvalue on failure.
void require_positive(const HermitianMetric& gamma);

/// del delbar gamma^{n-1} = 0 within tolerance.
bool is_gauduchon(const ExteriorModel& model, const HermitianMetric& gamma);

struct SGReport {
    bool gauduchon = false;
    int sg_level = 0;  // 1, 2 or 3; 0 means none
    double partial_norm = 0.0;  // |del gamma^{n-1}|
    double witness_residual = 0.0;
    std::optional<spectral::ExactnessWitness> witness;
};

/// Smallest r in {1,2,3} with del gamma^{n-1} E_r-exact (membership tested
/// against the spectral-route exactness space, witness re-validated).
/// Precondition: gamma Gauduchon.
SGReport sg_level(const ExteriorModel& model, const HermitianMetric& gamma);

/// Unique positive-definite (n-1)-st root: gamma with gamma^{n-1} = omega.
/// Newton iteration on the Hermitian coefficient matrix; throws Error with a
/// residual trace if it fails to converge within 100 steps.
HermitianMetric root_n_minus_1(const ExteriorModel& model, const Form& omega);

struct FamilySGPoint {
    Cplx t;
    bool ok = false;          // family point evaluated without error
    std::string error;        // per-point error text when !ok
    bool positive = false;    // (n-1)-st root exists and is positive definite
    bool gauduchon = false;
    int sg_level = 0;
    double root_residual = 0.0;
};

struct FamilySGReport {
    int level_at_zero = 0;
    std::vector<FamilySGPoint> points;
    std::optional<std::size_t> first_failure;  // first t where positivity or
                                               // the Gauduchon property fails
};

/// Transports gamma_0 along the family: the exactness potentials are
/// re-solved per t (projection of the t=0 potentials onto the t-constraint
/// space), the fixed (n-1,n-1) data is re-rooted, and the Gauduchon / sG
/// status of the rooted metric is reported per t. Per-point failures are
/// recorded and the scan continues.
FamilySGReport family_sg_scan(const FamilySpec& fam, const HermitianMetric& gamma0,
                              const std::vector<Cplx>& t_grid);

}  // namespace frolicher::sg
