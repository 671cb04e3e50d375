#include "frolicher/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "frolicher/harmonic.hpp"
#include "frolicher/linalg.hpp"
#include "frolicher/model_format.hpp"
#include "frolicher/rng.hpp"
#include "frolicher/sg.hpp"
#include "frolicher/spectral.hpp"

namespace frolicher::cli {

using json = nlohmann::ordered_json;

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

/// Renders meta + table in the requested format. CSV carries the meta as one
/// '#' header line; JSON mirrors it as an object.
std::string render(const RunConfig& config, const std::string& model_label,
                   const std::string& hash,
                   const std::vector<std::pair<std::string, std::string>>& extra_meta,
                   const Table& table) {
    std::vector<std::pair<std::string, std::string>> meta{
        {"tool", std::string("frolicher ") + kVersion},
        {"command", config.command},
        {"model", model_label},
        {"hash", hash},
        {"seed", std::to_string(config.seed)},
        {"tol_rank", fmt(config.tol_rank)},
        {"tol_zero", fmt(config.tol_zero)},
    };
    for (const auto& kv : extra_meta) meta.push_back(kv);

    // cells are strings internally; JSON re-types integers, reals and
    // booleans so the report mirrors the report structs
    auto typed = [](const std::string& cell) -> json {
        if (cell == "true") return true;
        if (cell == "false") return false;
        if (cell.empty() || cell == "inf" || cell == "none") return cell;
        char* end = nullptr;
        const long long integer = std::strtoll(cell.c_str(), &end, 10);
        if (end && *end == '\0') return integer;
        const double real = std::strtod(cell.c_str(), &end);
        if (end && *end == '\0') return real;
        return cell;
    };

    std::ostringstream out;
    if (config.format == Format::Json) {
        json j;
        json jm;
        for (const auto& [k, v] : meta)
            jm[k] = (k == "tool" || k == "command" || k == "model" || k == "hash")
                        ? json(v)
                        : typed(v);
        j["meta"] = jm;
        json jrows = json::array();
        for (const auto& row : table.rows) {
            json jrow;
            for (size_t i = 0; i < table.columns.size(); ++i)
                jrow[table.columns[i]] = typed(row[i]);
            jrows.push_back(jrow);
        }
        j["rows"] = jrows;
        out << j.dump(2) << "\n";
        return out.str();
    }

    out << "#";
    for (const auto& [k, v] : meta) out << " " << k << "=" << (k == "tool" ? "\"" + v + "\"" : v);
    out << "\n";
    if (config.format == Format::Csv) {
        for (size_t i = 0; i < table.columns.size(); ++i)
            out << table.columns[i] << (i + 1 < table.columns.size() ? "," : "\n");
        for (const auto& row : table.rows)
            for (size_t i = 0; i < row.size(); ++i)
                out << row[i] << (i + 1 < row.size() ? "," : "\n");
        return out.str();
    }

    // human: fixed-width columns
    std::vector<size_t> widths(table.columns.size());
    for (size_t i = 0; i < table.columns.size(); ++i) widths[i] = table.columns[i].size();
    for (const auto& row : table.rows)
        for (size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
    auto pad = [&](const std::string& s, size_t w) {
        return s + std::string(w - s.size(), ' ');
    };
    for (size_t i = 0; i < table.columns.size(); ++i)
        out << pad(table.columns[i], widths[i]) << (i + 1 < table.columns.size() ? "  " : "\n");
    for (const auto& row : table.rows)
        for (size_t i = 0; i < row.size(); ++i)
            out << pad(row[i], widths[i]) << (i + 1 < row.size() ? "  " : "\n");
    return out.str();
}

StructureSpec base_spec(const CatalogEntry& entry) {
    if (std::holds_alternative<StructureSpec>(entry)) return std::get<StructureSpec>(entry);
    return family_at(std::get<FamilySpec>(entry), Cplx(0, 0));
}

/// Scan grids keep |h| <= 10: theta_h conditioning degrades like h^n, so
/// larger moduli make SVD ranks untrustworthy.
void guard_h_grid(const std::vector<Cplx>& grid) {
    for (Cplx h : grid)
        if (std::abs(h) > 10.0)
            throw DomainError("|h| = " + std::to_string(std::abs(h)) +
                              " exceeds the scan bound 10");
}

std::vector<Cplx> default_t_grid(const FamilySpec& fam, int per_axis = 5) {
    std::vector<Cplx> grid;
    const double half = fam.disc_radius / 3.0;
    for (int i = 0; i < per_axis; ++i)
        for (int j = 0; j < per_axis; ++j) {
            const double re = -half + 2.0 * half * i / (per_axis - 1);
            const double im = -half + 2.0 * half * j / (per_axis - 1);
            grid.push_back({re, im});
        }
    return grid;
}

}  // namespace

std::string model_hash(const CatalogEntry& entry) {
    const std::string canon = std::holds_alternative<StructureSpec>(entry)
                                  ? canonical_spec(std::get<StructureSpec>(entry))
                                  : canonical_spec(std::get<FamilySpec>(entry));
    return hex64(fnv1a(canon));
}

CatalogEntry load_entry(const RunConfig& config) {
    if (!config.model.empty() && !config.file.empty())
        throw DomainError("give either --model or --file, not both");
    if (!config.model.empty()) return catalog(config.model);
    if (!config.file.empty()) return parse_model_file(config.file);
    throw DomainError("a model is required (--model <name> or --file <path>)");
}

std::vector<Cplx> seeded_h_sample(std::uint64_t seed, int count) {
    Rng rng(seed);
    std::vector<Cplx> out;
    for (int i = 0; i < count; ++i) out.push_back(rng.annulus(0.05, 5.0));
    return out;
}

std::vector<Cplx> parse_grid(const std::string& text) {
    std::vector<Cplx> out;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        size_t pos = 0;
        auto skip_ws = [&] { while (pos < token.size() && token[pos] == ' ') ++pos; };
        auto read_part = [&](double sign) {
            if (pos < token.size() && token[pos] == 'i') {
                ++pos;
                return Cplx(0, sign);
            }
            size_t start = pos;
            while (pos < token.size() &&
                   (std::isdigit(static_cast<unsigned char>(token[pos])) || token[pos] == '.' ||
                    token[pos] == 'e' || token[pos] == 'E' ||
                    ((token[pos] == '+' || token[pos] == '-') && pos > start &&
                     (token[pos - 1] == 'e' || token[pos - 1] == 'E'))))
                ++pos;
            if (start == pos) throw DomainError("bad grid literal '" + token + "'");
            const double mag = std::stod(token.substr(start, pos - start));
            if (pos < token.size() && token[pos] == 'i') {
                ++pos;
                return Cplx(0, sign * mag);
            }
            return Cplx(sign * mag, 0);
        };
        skip_ws();
        if (pos < token.size() && token[pos] == '(') ++pos;
        Cplx value{0, 0};
        bool any = false;
        while (pos < token.size()) {
            skip_ws();
            if (pos < token.size() && token[pos] == ')') {
                ++pos;
                continue;
            }
            if (pos >= token.size()) break;
            double sign = 1.0;
            if (token[pos] == '+' || token[pos] == '-') {
                sign = token[pos] == '-' ? -1.0 : 1.0;
                ++pos;
            } else if (any) {
                throw DomainError("bad grid literal '" + token + "'");
            }
            skip_ws();
            value += read_part(sign);
            any = true;
        }
        if (!any) throw DomainError("empty grid entry");
        out.push_back(value);
    }
    if (out.empty()) throw DomainError("empty grid");
    return out;
}

namespace {

RunResult run_validate(const RunConfig& config, const CatalogEntry& entry,
                       const std::string& label, const std::string& hash) {
    const ExteriorModel model = ExteriorModel::build(base_spec(entry));
    const auto report = validate_bicomplex(model.bicomplex(), config.tol_zero);
    Table t;
    t.columns = {"check", "p", "q", "residual"};
    for (const auto& v : report.violations)
        t.rows.push_back({v.identity, std::to_string(v.at.p), std::to_string(v.at.q),
                          fmt(v.residual)});
    RunResult result;
    result.status = report.valid ? 0 : 1;
    result.message = report.valid ? "all bicomplex identities hold"
                                  : std::to_string(report.violations.size()) +
                                        " identity violation(s)";
    result.report = render(config, label, hash,
                           {{"valid", report.valid ? "true" : "false"}}, t);
    return result;
}

RunResult run_pages(const RunConfig& config, const CatalogEntry& entry,
                    const std::string& label, const std::string& hash) {
    const ExteriorModel model = ExteriorModel::build(base_spec(entry));
    const Bicomplex& bc = model.bicomplex();
    const int degen = spectral::degeneration_page(bc);
    const int r_hi = config.r ? *config.r : degen + 1;
    const int r_lo = config.r ? *config.r : 1;

    Table t;
    t.columns = {"r", "p", "q", "dim"};
    for (int r = r_lo; r <= r_hi; ++r) {
        const auto dims = spectral::page_dims(bc, r);
        for (const auto& [pq, d] : dims)
            t.rows.push_back(
                {std::to_string(r), std::to_string(pq.p), std::to_string(pq.q),
                 std::to_string(d)});
    }
    RunResult result;
    result.status = 0;
    result.message = "degeneration page " + std::to_string(degen);
    result.report = render(config, label, hash,
                           {{"degeneration_page", std::to_string(degen)}}, t);
    return result;
}

RunResult run_dh(const RunConfig& config, const CatalogEntry& entry,
                 const std::string& label, const std::string& hash) {
    const ExteriorModel model = ExteriorModel::build(base_spec(entry));
    const Bicomplex& bc = model.bicomplex();
    const harmonic::Hodge hodge{bc};
    const std::vector<Cplx> grid =
        config.h_grid.empty() ? seeded_h_sample(config.seed, 8) : config.h_grid;
    guard_h_grid(grid);

    std::vector<int> degrees;
    if (config.k)
        degrees.push_back(*config.k);
    else
        for (int k = 0; k <= 2 * bc.n(); ++k) degrees.push_back(k);

    Table t;
    t.columns = {"h_real", "h_imag", "k", "dim", "betti"};
    bool violated = false;
    for (int k : degrees) {
        const int bk = betti(bc, k);
        for (Cplx h : grid) {
            const auto spec = lin::hermitian_spectrum(harmonic::laplacian_h(hodge, h, k));
            if (h != Cplx(0, 0) && spec.kernel_dim != bk) violated = true;
            t.rows.push_back({fmt(h.real()), fmt(h.imag()), std::to_string(k),
                              std::to_string(spec.kernel_dim), std::to_string(bk)});
        }
    }
    RunResult result;
    result.status = violated ? 1 : 0;
    result.message = violated ? "d_h-cohomology dimension differs from b_k at some h != 0"
                              : "d_h-cohomology dimension equals b_k at every sampled h != 0";
    result.report = render(config, label, hash, {}, t);
    return result;
}

RunResult run_favb(const RunConfig& config, const CatalogEntry& entry,
                   const std::string& label, const std::string& hash) {
    const ExteriorModel model = ExteriorModel::build(base_spec(entry));
    const Bicomplex& bc = model.bicomplex();
    const harmonic::Hodge hodge{bc};
    const int k = config.k ? *config.k : 1;
    const int degen = spectral::degeneration_page(bc);
    const int r = config.r ? *config.r : degen;
    const auto tower = harmonic::harmonic_tower(hodge, std::max(1, r - 1));
    const auto grid = config.h_grid.empty() ? harmonic::default_h_grid() : config.h_grid;
    guard_h_grid(grid);

    const auto scan = harmonic::favb_scan(hodge, tower, &model, k, r, grid, config.jobs);

    Table t;
    t.columns = {"h_real", "h_imag", "kernel_dim", "lambda_bk", "lambda_bk_plus_1"};
    for (const auto& pt : scan.points)
        t.rows.push_back({fmt(pt.h.real()), fmt(pt.h.imag()), std::to_string(pt.kernel_dim),
                          fmt(pt.lambda_bk),
                          pt.lambda_bk_plus_1 ? fmt(*pt.lambda_bk_plus_1) : "inf"});
    RunResult result;
    result.status = scan.rank_constant ? 0 : 1;
    result.message = scan.rank_constant
                         ? "kernel rank constant = b_k over the grid"
                         : (scan.jump_at_zero ? "rank jump at h = 0" : "rank not constant");
    result.report = render(config, label, hash,
                           {{"k", std::to_string(k)},
                            {"r", std::to_string(r)},
                            {"betti", std::to_string(scan.betti)},
                            {"rank_constant", scan.rank_constant ? "true" : "false"},
                            {"jump_at_zero", scan.jump_at_zero ? "true" : "false"}},
                           t);
    return result;
}

RunResult run_tower(const RunConfig& config, const CatalogEntry& entry,
                    const std::string& label, const std::string& hash) {
    const ExteriorModel model = ExteriorModel::build(base_spec(entry));
    const Bicomplex& bc = model.bicomplex();
    const harmonic::Hodge hodge{bc};
    const int degen = spectral::degeneration_page(bc);
    const int r_max = config.r ? *config.r : std::min(degen + 1, bc.n() + 1);
    const auto tower = harmonic::harmonic_tower(hodge, r_max);

    Table t;
    t.columns = {"r", "p", "q", "dim_harmonic", "dim_spectral", "match"};
    bool mismatch = false;
    for (int r = 1; r <= tower.r_max; ++r) {
        const auto dims = spectral::page_dims(bc, r);
        for (const auto& [pq, d] : dims) {
            const int hd = tower.dim(r, pq);
            if (hd != d) mismatch = true;
            t.rows.push_back({std::to_string(r), std::to_string(pq.p), std::to_string(pq.q),
                              std::to_string(hd), std::to_string(d),
                              hd == d ? "yes" : "NO"});
        }
    }
    RunResult result;
    result.status = mismatch ? 1 : 0;
    result.message = mismatch ? "tower/page dimension mismatch"
                              : "harmonic tower matches the spectral route";
    result.report = render(config, label, hash,
                           {{"degeneration_page", std::to_string(degen)},
                            {"r_max", std::to_string(tower.r_max)}},
                           t);
    return result;
}

RunResult run_sg(const RunConfig& config, const CatalogEntry& entry,
                 const std::string& label, const std::string& hash) {
    const ExteriorModel model = ExteriorModel::build(base_spec(entry));
    sg::HermitianMetric gamma{Mat::Identity(model.n(), model.n())};
    const bool gauduchon = sg::is_gauduchon(model, gamma);
    sg::SGReport report;
    if (gauduchon) report = sg::sg_level(model, gamma);

    Table t;
    t.columns = {"gauduchon", "sg_level", "partial_norm", "witness_residual"};
    t.rows.push_back({gauduchon ? "true" : "false",
                      report.sg_level > 0 ? std::to_string(report.sg_level) : "none",
                      fmt(report.partial_norm), fmt(report.witness_residual)});
    RunResult result;
    result.status = 0;
    result.message = !gauduchon ? "identity metric is not Gauduchon"
                     : report.sg_level > 0
                         ? "E_" + std::to_string(report.sg_level) + "-sG"
                         : "Gauduchon but not E_r-sG for r <= 3";
    result.report = render(config, label, hash, {}, t);
    return result;
}

RunResult run_family(const RunConfig& config, const CatalogEntry& entry,
                     const std::string& label, const std::string& hash) {
    if (!std::holds_alternative<FamilySpec>(entry))
        throw DomainError("the 'family' command needs a family model");
    const FamilySpec& fam = std::get<FamilySpec>(entry);
    const std::vector<Cplx> t_grid =
        config.t_grid.empty() ? default_t_grid(fam) : config.t_grid;

    if (config.sg_mode) {
        const ExteriorModel model0 = ExteriorModel::build(family_at(fam, Cplx(0, 0)));
        sg::HermitianMetric gamma0{Mat::Identity(model0.n(), model0.n())};
        const auto scan = sg::family_sg_scan(fam, gamma0, t_grid);
        Table t;
        t.columns = {"t_real", "t_imag", "ok", "positive", "gauduchon", "sg_level",
                     "root_residual"};
        for (const auto& pt : scan.points)
            t.rows.push_back({fmt(pt.t.real()), fmt(pt.t.imag()), pt.ok ? "true" : "false",
                              pt.positive ? "true" : "false",
                              pt.gauduchon ? "true" : "false",
                              pt.sg_level > 0 ? std::to_string(pt.sg_level) : "none",
                              fmt(pt.root_residual)});
        RunResult result;
        result.status = 0;
        result.message = scan.first_failure
                             ? "first sG transport failure at grid index " +
                                   std::to_string(*scan.first_failure)
                             : "sG transport succeeded on the whole grid";
        result.report = render(config, label, hash,
                               {{"level_at_zero", std::to_string(scan.level_at_zero)}}, t);
        return result;
    }

    const int k = config.k ? *config.k : 1;
    const auto h_grid = config.h_grid.empty() ? harmonic::default_h_grid() : config.h_grid;
    guard_h_grid(h_grid);
    const auto scan = harmonic::family_scan(fam, k, h_grid, t_grid, config.jobs);

    Table t;
    t.columns = {"t_real", "t_imag", "h_real", "h_imag", "kernel_dim", "degen_page"};
    for (const auto& pt : scan.points)
        t.rows.push_back({fmt(pt.t.real()), fmt(pt.t.imag()), fmt(pt.h.real()),
                          fmt(pt.h.imag()), std::to_string(pt.kernel_dim),
                          std::to_string(pt.degen_page)});
    RunResult result;
    result.status = scan.fibre_rank_constant ? 0 : 1;
    result.message = scan.fibre_rank_constant ? "fibre rank constant = b_k"
                                              : "fibre rank varies over the grid";
    result.report = render(config, label, hash,
                           {{"k", std::to_string(k)},
                            {"betti", std::to_string(scan.betti)},
                            {"fibre_rank_constant", scan.fibre_rank_constant ? "true" : "false"},
                            {"hodge_upper_semicontinuous",
                             scan.hodge_upper_semicontinuous ? "true" : "false"}},
                           t);
    return result;
}

}  // namespace

RunResult run(const RunConfig& config) {
    RunResult result;
    try {
        if (config.tol_rank <= 0 || config.tol_zero <= 0)
            throw DomainError("tolerances must be positive");
        tolerances().rank = config.tol_rank;
        tolerances().zero = config.tol_zero;

        const CatalogEntry entry = load_entry(config);
        const std::string label = !config.model.empty() ? config.model : config.file;
        const std::string hash = model_hash(entry);

        if (config.command == "validate") return run_validate(config, entry, label, hash);
        if (config.command == "pages") return run_pages(config, entry, label, hash);
        if (config.command == "dh") return run_dh(config, entry, label, hash);
        if (config.command == "favb") return run_favb(config, entry, label, hash);
        if (config.command == "tower") return run_tower(config, entry, label, hash);
        if (config.command == "sg") return run_sg(config, entry, label, hash);
        if (config.command == "family") return run_family(config, entry, label, hash);
        throw DomainError("unknown command '" + config.command + "'");
    } catch (const Error& e) {
        result.status = 2;
        result.message = e.what();
        return result;
    } catch (const std::exception& e) {
        result.status = 2;
        result.message = e.what();
        return result;
    }
}

int run_and_write(const RunConfig& config) {
    const RunResult result = run(config);
    if (!result.message.empty()) std::cerr << result.message << "\n";
    if (result.status == 2) return 2;
    if (config.out.empty()) {
        std::cout << result.report;
    } else {
        std::ofstream out(config.out, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write to '" << config.out << "'\n";
            return 2;
        }
        out << result.report;
    }
    return result.status;
}

}  // namespace frolicher::cli
