#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "frolicher/models.hpp"

namespace frolicher::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class Format { Human, Csv, Json };

struct RunConfig {
    std::string command;             // validate | pages | dh | favb | tower | sg | family
    std::string model;               // catalog name
    std::string file;                // or model file path
    std::optional<int> k;            // degree (commands default sensibly)
    std::optional<int> r;            // page override
    std::vector<Cplx> h_grid;        // empty = command default
    std::vector<Cplx> t_grid;        // empty = command default
    std::uint64_t seed = 42;
    double tol_rank = 1e-9;
    double tol_zero = 1e-10;
    Format format = Format::Human;
    std::string out;                 // empty = stdout
    int jobs = 1;
    bool sg_mode = false;            // family --sg
};

struct RunResult {
    int status = 0;       // 0 ok, 1 violated invariant, 2 input error
    std::string report;   // artifact text (csv / json / human table)
    std::string message;  // human-readable status line (stderr candidates)
};

/// Executes one command and renders the report; never throws (errors map to
/// status 2 with the message filled in).
RunResult run(const RunConfig& config);

/// run() plus writing the artifact to config.out or stdout.
int run_and_write(const RunConfig& config);

/// FNV-1a hash of the canonical model serialisation.
std::string model_hash(const CatalogEntry& entry);

/// Loads a model from config.model / config.file.
CatalogEntry load_entry(const RunConfig& config);

/// Seeded sample of h values in the annulus 0.05 <= |h| <= 5.
std::vector<Cplx> seeded_h_sample(std::uint64_t seed, int count);

/// Grid string parser: comma-separated complex literals ("0,1,-0.5i,(1+2i)").
std::vector<Cplx> parse_grid(const std::string& text);

}  // namespace frolicher::cli
