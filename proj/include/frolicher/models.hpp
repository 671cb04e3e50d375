#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "frolicher/bicomplex.hpp"
#include "frolicher/types.hpp"

namespace frolicher {

// ---------------------------------------------------------------------------
// Structure equations
// ---------------------------------------------------------------------------

/// One wedge monomial on the right-hand side of d(phi^i). Indices are
/// 0-based; kind selects phi^a ^ phi^b, phi^a ^ phibar^b or
/// phibar^a ^ phibar^b (the last is never integrable and is rejected by
/// build_model).
struct StructureTerm {
    enum Kind { HolHol, HolAnti, AntiAnti };
    Kind kind = HolHol;
    int a = 0;
    int b = 0;
    Cplx coeff{0, 0};
};

struct StructureSpec {
    int n = 0;
    std::vector<std::vector<StructureTerm>> equations;  // equations[i] = d(phi^{i+1})

    bool operator==(const StructureSpec&) const = default;
};

/// Polynomial in t and conj(t) with complex coefficients; keys are
/// (power of t, power of conj t).
using TPoly = std::map<std::pair<int, int>, Cplx>;

Cplx evaluate(const TPoly& poly, Cplx t);

struct FamilyTerm {
    StructureTerm::Kind kind = StructureTerm::HolHol;
    int a = 0;
    int b = 0;
    TPoly coeff;
};

struct FamilySpec {
    int n = 0;
    std::vector<std::vector<FamilyTerm>> equations;
    double disc_radius = 1.0;
    std::string parameter = "t";
};

/// Coefficient functions evaluated at t; throws DomainError outside the
/// validity disc.
StructureSpec family_at(const FamilySpec& fam, Cplx t);

// ---------------------------------------------------------------------------
// Monomial basis bookkeeping
// ---------------------------------------------------------------------------

/// Basis monomial phi^I ^ phibar^J with I, J strictly increasing. All signs in
/// the model derive from permutation parity relative to this order
/// (holomorphic indices first).
struct Monomial {
    std::vector<int> hol;
    std::vector<int> anti;
};

/// Lexicographic position of a sorted subset among all size-|s| subsets of
/// {0,..,n-1}.
int subset_rank(int n, const std::vector<int>& s);
std::vector<int> subset_unrank(int n, int size, int rank);
long long binomial(int n, int k);

// ---------------------------------------------------------------------------
// ExteriorModel
// ---------------------------------------------------------------------------

/// Bicomplex of the free exterior algebra on the coframe, enriched with
/// wedge, conjugation and top-form integration. Coframe monomials are
/// declared orthonormal, so the default metric is omega = i * sum phi^j ^
/// phibar^j and adjoints are plain conjugate transposes.
class ExteriorModel {
public:
    static ExteriorModel build(const StructureSpec& spec);

    int n() const { return spec_.n; }
    const StructureSpec& spec() const { return spec_; }
    const Bicomplex& bicomplex() const { return bc_; }

    int monomial_index(const Monomial& m) const;
    Monomial monomial_at(Bidegree pq, int index) const;
    std::string monomial_name(Bidegree pq, int index) const;

    Form monomial_form(const Monomial& m, Cplx coeff = Cplx(1, 0)) const;
    Form zero_form(int k) const { return bc_.zero_form(k); }

    /// Graded-commutative associative product in the monomial basis.
    Form wedge(const Form& u, const Form& v) const;

    /// Anti-linear conjugation; swaps bidegrees (p,q) <-> (q,p).
    Form conjugate(const Form& u) const;

    /// Signed-permutation matrix C with conj(u)_{(q,p)} = C * conj-coeffs of
    /// u_{(p,q)} (the map itself is anti-linear).
    Mat conjugation_matrix(Bidegree pq) const;

    /// Coefficient of the top monomial times the volume normalisation.
    Cplx integrate(const Form& u) const;

    double volume_normalization() const { return volume_; }

private:
    StructureSpec spec_;
    Bicomplex bc_;
    double volume_ = 1.0;
    // d(phi^i) and d(phibar^i) as generator-pair term lists, used by the
    // Leibniz extension.
    struct GenImage {
        std::vector<std::pair<Monomial, Cplx>> del;
        std::vector<std::pair<Monomial, Cplx>> delbar;
    };
    std::vector<GenImage> hol_images_;   // images of phi^i
    std::vector<GenImage> anti_images_;  // images of phibar^i
};

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

using CatalogEntry = std::variant<StructureSpec, FamilySpec>;

/// Named standard examples: torus_<n>, iwasawa, primary_kodaira,
/// nilmanifold_e3, iwasawa_family. Unknown names raise DomainError listing
/// the choices.
CatalogEntry catalog(const std::string& name);

std::vector<std::string> catalog_names();

}  // namespace frolicher
