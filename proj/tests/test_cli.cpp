#include <doctest.h>

#include "frolicher/cli.hpp"
#include "frolicher/linalg.hpp"
#include "frolicher/model_format.hpp"
#include "support/common.hpp"

using namespace frolicher;
using testutil::catalog_model;

TEST_CASE("parse_model_text: iwasawa file matches the catalog entry") {
    const auto entry = parse_model_text("n = 3\nd1 = 0\nd2 = 0\nd3 = -12\n");
    REQUIRE(std::holds_alternative<StructureSpec>(entry));
    const auto& spec = std::get<StructureSpec>(entry);
    CHECK(canonical_spec(spec) ==
          canonical_spec(std::get<StructureSpec>(catalog("iwasawa"))));
}

TEST_CASE("parse_model_text: torus file") {
    const auto entry = parse_model_text("n = 2\nd1 = 0\nd2 = 0\n");
    const auto& spec = std::get<StructureSpec>(entry);
    CHECK(canonical_spec(spec) ==
          canonical_spec(std::get<StructureSpec>(catalog("torus_2"))));
}

TEST_CASE("parse_model_text: barred monomials, coefficients, comments") {
    const auto entry = parse_model_text(
        "# primary Kodaira surface\n"
        "n = 2\n"
        "d1 = 0\n"
        "d2 = 11'\n");
    const auto& spec = std::get<StructureSpec>(entry);
    CHECK(canonical_spec(spec) ==
          canonical_spec(std::get<StructureSpec>(catalog("primary_kodaira"))));

    const auto entry2 = parse_model_text(
        "n = 3\nd3 = -2*12 + (0.5+0.25i)*11' - i*1'2'\n");
    const auto& spec2 = std::get<StructureSpec>(entry2);
    REQUIRE(spec2.equations[2].size() == 3);
    CHECK(spec2.equations[2][0].coeff == Cplx(-2, 0));
    CHECK(spec2.equations[2][1].coeff == Cplx(0.5, 0.25));
    CHECK(spec2.equations[2][1].kind == StructureTerm::HolAnti);
    CHECK(spec2.equations[2][2].coeff == Cplx(0, -1));
    CHECK(spec2.equations[2][2].kind == StructureTerm::AntiAnti);
}

TEST_CASE("parse_model_text: reversed bar order picks up the parity sign") {
    // 1'2 means phibar^1 ^ phi^2 = -phi^2 ^ phibar^1
    const auto entry = parse_model_text("n = 3\nd3 = 1'2\n");
    const auto& spec = std::get<StructureSpec>(entry);
    REQUIRE(spec.equations[2].size() == 1);
    CHECK(spec.equations[2][0].kind == StructureTerm::HolAnti);
    CHECK(spec.equations[2][0].a == 1);
    CHECK(spec.equations[2][0].b == 0);
    CHECK(spec.equations[2][0].coeff == Cplx(-1, 0));
}

TEST_CASE("parse_model_text: malformed token reports line and column") {
    try {
        parse_model_text("n = 3\nd1 = 0\nd2 = 0\nd3 = -1x\n");
        FAIL("expected a ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 4);
        CHECK(std::string(e.what()).find("'x'") != std::string::npos);
    }
}

TEST_CASE("parse_model_text: family mode") {
    const auto entry = parse_model_text(
        "n = 3\n"
        "family t in disc(2)\n"
        "d3 = -12 - t*12'\n");
    REQUIRE(std::holds_alternative<FamilySpec>(entry));
    const auto& fam = std::get<FamilySpec>(entry);
    CHECK(canonical_spec(fam) ==
          canonical_spec(std::get<FamilySpec>(catalog("iwasawa_family"))));

    // t is rejected outside family mode
    CHECK_THROWS_AS(parse_model_text("n = 3\nd3 = t*12\n"), ParseError);
    // tbar powers parse
    const auto entry2 =
        parse_model_text("n = 2\nfamily t in disc(1)\nd2 = t^2*tbar*11'\n");
    const auto& fam2 = std::get<FamilySpec>(entry2);
    REQUIRE(fam2.equations[1].size() == 1);
    CHECK(fam2.equations[1][0].coeff.at({2, 1}) == Cplx(1, 0));
}

TEST_CASE("parse_grid accepts complex literals") {
    const auto grid = cli::parse_grid("0,1,-0.5i,(1+2i),0.25");
    REQUIRE(grid.size() == 5);
    CHECK(grid[0] == Cplx(0, 0));
    CHECK(grid[1] == Cplx(1, 0));
    CHECK(grid[2] == Cplx(0, -0.5));
    CHECK(grid[3] == Cplx(1, 2));
    CHECK(grid[4] == Cplx(0.25, 0));
    CHECK_THROWS_AS(cli::parse_grid("1,,2"), DomainError);
    CHECK_THROWS_AS(cli::parse_grid("xyz"), DomainError);
}

TEST_CASE("run: pages on iwasawa reports degeneration page 2") {
    cli::RunConfig config;
    config.command = "pages";
    config.model = "iwasawa";
    config.format = cli::Format::Csv;
    const auto result = cli::run(config);
    CHECK(result.status == 0);
    CHECK(result.report.find("degeneration_page=2") != std::string::npos);
    CHECK(result.report.find("r,p,q,dim") != std::string::npos);
}

TEST_CASE("run: favb negative control exits with status 1") {
    cli::RunConfig config;
    config.command = "favb";
    config.model = "iwasawa";
    config.k = 1;
    config.r = 1;
    config.format = cli::Format::Csv;
    const auto result = cli::run(config);
    CHECK(result.status == 1);
    CHECK(result.report.find("jump_at_zero=true") != std::string::npos);

    config.r = 2;
    CHECK(cli::run(config).status == 0);

    cli::RunConfig torus;
    torus.command = "favb";
    torus.model = "torus_2";
    torus.k = 1;
    torus.r = 1;
    CHECK(cli::run(torus).status == 0);
}

TEST_CASE("run: input errors give status 2") {
    cli::RunConfig config;
    config.command = "pages";
    config.model = "no_such_model";
    const auto result = cli::run(config);
    CHECK(result.status == 2);
    CHECK(result.message.find("available") != std::string::npos);

    cli::RunConfig missing;
    missing.command = "pages";
    CHECK(cli::run(missing).status == 2);

    cli::RunConfig file_missing;
    file_missing.command = "validate";
    file_missing.file = "/nonexistent/model.txt";
    CHECK(cli::run(file_missing).status == 2);

    cli::RunConfig bad_cmd;
    bad_cmd.command = "frobnicate";
    bad_cmd.model = "iwasawa";
    CHECK(cli::run(bad_cmd).status == 2);

    cli::RunConfig non_integrable;
    non_integrable.command = "pages";
    non_integrable.file = "/tmp/frolicher_bad_model.txt";
    {
        FILE* f = fopen("/tmp/frolicher_bad_model.txt", "w");
        fputs("n = 2\nd1 = 22'\nd2 = 11'\n", f);
        fclose(f);
    }
    CHECK(cli::run(non_integrable).status == 2);
}

TEST_CASE("run: family command needs a family model") {
    cli::RunConfig config;
    config.command = "family";
    config.model = "iwasawa";
    CHECK(cli::run(config).status == 2);

    config.model = "iwasawa_family";
    config.k = 1;
    config.h_grid = {{0, 0}, {1, 0}};
    config.t_grid = {{0, 0}, {0.1, 0}};
    config.format = cli::Format::Csv;
    const auto result = cli::run(config);
    CHECK(result.status == 0);
    CHECK(result.report.find("t_real,t_imag,h_real,h_imag,kernel_dim,degen_page") !=
          std::string::npos);
}

TEST_CASE("reports are byte-identical across runs and parallelism levels") {
    for (const char* cmd : {"pages", "dh", "favb", "tower", "sg"}) {
        cli::RunConfig config;
        config.command = cmd;
        config.model = "iwasawa";
        config.k = 1;
        config.seed = 4242;
        config.format = cli::Format::Csv;
        const auto first = cli::run(config);
        const auto second = cli::run(config);
        CHECK_MESSAGE(first.report == second.report, cmd);
        config.jobs = 3;
        const auto parallel = cli::run(config);
        CHECK_MESSAGE(first.report == parallel.report, cmd);
    }
    // json too
    cli::RunConfig config;
    config.command = "favb";
    config.model = "iwasawa";
    config.k = 2;
    config.format = cli::Format::Json;
    CHECK(cli::run(config).report == cli::run(config).report);
}

TEST_CASE("CSV header carries version, seed, tolerances and model hash") {
    cli::RunConfig config;
    config.command = "pages";
    config.model = "iwasawa";
    config.seed = 987;
    config.format = cli::Format::Csv;
    const auto result = cli::run(config);
    const std::string header = result.report.substr(0, result.report.find('\n'));
    CHECK(header.find("frolicher 0.1.0") != std::string::npos);
    CHECK(header.find("seed=987") != std::string::npos);
    CHECK(header.find("tol_rank=1e-09") != std::string::npos);
    CHECK(header.find("tol_zero=1e-10") != std::string::npos);
    CHECK(header.find("hash=") != std::string::npos);

    // hash depends on the model
    cli::RunConfig other = config;
    other.model = "torus_2";
    const auto other_result = cli::run(other);
    auto hash_of = [](const std::string& report) {
        const auto at = report.find("hash=");
        return report.substr(at, 21);
    };
    CHECK(hash_of(result.report) != hash_of(other_result.report));
}

TEST_CASE("seeded h sample is reproducible and respects the annulus") {
    const auto a = cli::seeded_h_sample(7, 8);
    const auto b = cli::seeded_h_sample(7, 8);
    REQUIRE(a.size() == 8);
    CHECK(a == b);
    for (Cplx h : a) {
        CHECK(std::abs(h) >= 0.05);
        CHECK(std::abs(h) <= 5.0);
    }
    CHECK(cli::seeded_h_sample(8, 8) != a);
}

TEST_CASE("tower command cross-checks the two routes") {
    cli::RunConfig config;
    config.command = "tower";
    config.model = "nilmanifold_e3";
    config.format = cli::Format::Csv;
    const auto result = cli::run(config);
    CHECK(result.status == 0);
    CHECK(result.report.find("NO") == std::string::npos);
}
