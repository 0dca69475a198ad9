#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "spinstar/experiments/config.hpp"
#include "spinstar/experiments/runner.hpp"

using namespace spinstar;
using namespace spinstar::experiments;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("spinstar-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig small(Experiment e, const fs::path& out) {
    ExperimentConfig cfg;
    cfg.experiment = e;
    cfg.n_units = 4;
    cfg.theta_points = 5;
    cfg.time_points = 7;
    cfg.c_points = 3;
    cfg.output_path = out;
    return cfg;
}

double cell(const CsvTable& t, std::size_t row, const std::string& col) { return parse_real_cell(t.rows[row][t.column(col)]); }

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SPINSTAR_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(ParseConfig, DefaultsAndPresets) {
    const auto cfg = parse_config({});
    EXPECT_EQ(cfg.experiment, Experiment::corr_fraction_qjsd);
    EXPECT_EQ(cfg.n_units, 8);
    EXPECT_EQ(cfg.p, 0.5);
    EXPECT_EQ(cfg.theta_points, 65);
    EXPECT_EQ(cfg.time_points, 129);
    const auto cs = cfg.effective_c_values();
    ASSERT_EQ(cs.size(), 21u);
    EXPECT_EQ(cs.front(), 0.0);
    EXPECT_NEAR(cs.back(), 0.5, 1e-15);

    auto bf = cfg;
    bf.experiment = Experiment::bound_fraction;
    ASSERT_EQ(bf.effective_c_values().size(), 3u);
    EXPECT_NEAR(bf.effective_c_values()[1], 1.0 / 3, 1e-15);
}

TEST(ParseConfig, FlagsAndPositional) {
    const auto cfg = parse_config({"bound_time", "--n", "5", "--p", "0.3", "--c", "0.1,0.2", "--c", "0.4", "--out", "x",
                                   "--plots", "--theta-points", "9", "--time-points", "11"});
    EXPECT_EQ(cfg.experiment, Experiment::bound_time);
    EXPECT_EQ(cfg.n_units, 5);
    EXPECT_EQ(cfg.p, 0.3);
    EXPECT_EQ(cfg.c_values, (std::vector<double>{0.1, 0.2, 0.4}));
    EXPECT_EQ(cfg.output_path, fs::path("x"));
    EXPECT_TRUE(cfg.emit_plots);
    EXPECT_EQ(cfg.theta_points, 9);
    EXPECT_EQ(cfg.time_points, 11);
}

TEST(ParseConfig, FlagsOverrideConfigFile) {
    TempDir dir;
    const auto file = dir.path() / "run.cfg";
    std::ofstream(file) << "# sweep\nexperiment = violation_map\nn = 6\np=0.4  # biased\nc = 0.1, 0.2\n";
    const auto from_file = parse_config({"--config", file.string()});
    EXPECT_EQ(from_file.experiment, Experiment::violation_map);
    EXPECT_EQ(from_file.n_units, 6);
    EXPECT_EQ(from_file.p, 0.4);
    EXPECT_EQ(from_file.c_values, (std::vector<double>{0.1, 0.2}));
    const auto overridden = parse_config({"--config", file.string(), "--n", "3"});
    EXPECT_EQ(overridden.n_units, 3);
    EXPECT_EQ(overridden.p, 0.4);
}

TEST(ParseConfig, ErrorsNameTheOffendingKey) {
    auto key_of = [](const std::vector<std::string>& args) {
        try {
            parse_config(args);
        } catch (const UsageError& e) {
            return e.key();
        }
        return std::string("<none>");
    };
    EXPECT_EQ(key_of({"--c", "0.9"}), "c");
    EXPECT_EQ(key_of({"--n", "13"}), "n");
    EXPECT_EQ(key_of({"--n", "2.5"}), "n");
    EXPECT_EQ(key_of({"--p", "abc"}), "p");
    EXPECT_EQ(key_of({"no_such_experiment"}), "experiment");
    EXPECT_EQ(key_of({"--theta-points", "1"}), "theta_points");
    EXPECT_EQ(key_of({"--config", "/nonexistent/run.cfg"}), "config");
    EXPECT_THROW(parse_config({"--bogus"}), UsageError);

    TempDir dir;
    const auto file = dir.path() / "bad.cfg";
    std::ofstream(file) << "colour = blue\n";
    EXPECT_EQ(key_of({"--config", file.string()}), "colour");
}

TEST(RunExperiment, WritesEveryPresetWithItsSchema) {
    TempDir dir;
    const std::map<Experiment, std::string> headers{
        {Experiment::corr_time, "c,gs,sqrtJ_raw,sqrtJ_rescaled"},
        {Experiment::corr_fraction_qjsd, "c,f,m,value_raw,value_rescaled"},
        {Experiment::corr_fraction_mi, "c,f,m,value_raw,value_rescaled"},
        {Experiment::lhs_time, "theta,gs,gt,lhs_signed,lhs_positive_part"},
        {Experiment::bound_time, "c,theta,gs,f,m,env_dist,corr1,corr2,rhs_sum,lhs_signed,violated"},
        {Experiment::bound_fraction, "c,theta,gs,f,m,env_dist,corr1,corr2,rhs_sum,lhs_signed,violated"},
        {Experiment::time_fraction_surface, "c,gs,f,m,env_dist,corr1"},
        {Experiment::violation_map, "c,theta,f,m,lhs_minus_rhs"},
    };
    for (const auto& e : kExperiments) {
        auto cfg = small(e.id, dir.path() / std::string(e.name));
        cfg.emit_plots = true;
        const auto summary = run_experiment(cfg);
        ASSERT_FALSE(summary.files.empty()) << e.name;
        std::size_t rows = 0;
        for (const auto& f : summary.files) {
            ASSERT_TRUE(fs::exists(f)) << f;
            if (f.extension() != ".csv") continue;
            const auto text = slurp(f);
            EXPECT_EQ(text.substr(0, text.find('\n')), headers.at(e.id)) << e.name;
            rows += read_csv(f).rows.size();
        }
        EXPECT_EQ(rows, summary.rows_written) << e.name;
    }
}

TEST(RunExperiment, RerunsAreByteIdentical) {
    TempDir a, b;
    const auto one = run_experiment(small(Experiment::bound_fraction, a.path()));
    const auto two = run_experiment(small(Experiment::bound_fraction, b.path()));
    ASSERT_EQ(one.files.size(), two.files.size());
    for (std::size_t i = 0; i < one.files.size(); ++i) {
        EXPECT_EQ(one.files[i].filename(), two.files[i].filename());
        EXPECT_EQ(slurp(one.files[i]), slurp(two.files[i]));
    }
}

TEST(RunExperiment, RowsMatchDirectEvaluation) {
    TempDir dir;
    auto cfg = small(Experiment::bound_time, dir.path());
    cfg.c_values = {0.3};
    const auto summary = run_experiment(cfg);
    const auto t = read_csv(summary.files.at(0));
    ASSERT_EQ(t.rows.size(), 5u * 7u);
    std::mt19937_64 rng(501);
    const auto params = ModelParams::uniform(4, 0.5, 0.3);
    for (int k = 0; k < 10; ++k) {
        const std::size_t r = std::uniform_int_distribution<std::size_t>(0, t.rows.size() - 1)(rng);
        const auto b = bound_terms(params, PairSpec::from_theta(cell(t, r, "theta")), cell(t, r, "gs"), kPi / 2,
                                   Fraction::whole(4));
        EXPECT_EQ(cell(t, r, "env_dist"), b.env_dist);
        EXPECT_EQ(cell(t, r, "rhs_sum"), b.rhs_sum);
        EXPECT_EQ(cell(t, r, "lhs_signed"), b.lhs);
        EXPECT_EQ(t.rows[r][t.column("violated")], b.violated ? "1" : "0");
        EXPECT_EQ(cell(t, r, "m"), 4.0);
    }
}

TEST(RunExperiment, FractionSweepShowsPlateauAndFactorization) {
    TempDir dir;
    auto cfg = small(Experiment::corr_fraction_mi, dir.path());
    cfg.n_units = 6;
    cfg.c_values = {0.0, 0.5};
    const auto t = read_csv(run_experiment(cfg).files.at(0));
    ASSERT_EQ(t.rows.size(), 14u);
    for (std::size_t r = 0; r < 7; ++r) {
        const int m = static_cast<int>(cell(t, r, "m"));
        if (m < 6) {
            EXPECT_LE(cell(t, r, "value_raw"), 1e-9);
        } else {
            EXPECT_GT(cell(t, r, "value_raw"), 0.1);
        }
    }
    for (std::size_t r = 8; r < 13; ++r) EXPECT_NEAR(cell(t, r, "value_rescaled"), 0.5, 1e-8);
}

TEST(RunExperiment, ViolationMapHasAPositiveRegionAtThirdCoherence) {
    TempDir dir;
    const auto t = read_csv(run_experiment(small(Experiment::violation_map, dir.path())).files.at(0));
    bool positive = false;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double v = cell(t, r, "lhs_minus_rhs");
        if (cell(t, r, "m") == 4.0) {
            EXPECT_LE(v, kViolationTolerance);
        }
        positive = positive || v > kViolationTolerance;
    }
    EXPECT_TRUE(positive);
}

TEST(RunExperiment, OutputFileNamesCarryCoherence) {
    const double c = 1.0 / 3;
    EXPECT_EQ(output_name(Experiment::bound_fraction, &c), "bound_fraction_c0.333333.csv");
    EXPECT_EQ(output_name(Experiment::lhs_time, nullptr), "lhs_time.csv");
}

TEST(RunExperiment, UnwritableOutputIsAnIoError) {
    TempDir dir;
    const auto blocker = dir.path() / "file";
    std::ofstream(blocker) << "x";
    EXPECT_THROW(run_experiment(small(Experiment::corr_time, blocker / "sub")), IoError);
}

TEST(Plot, RendersSvgFromCsv) {
    TempDir dir;
    const auto csv = run_experiment(small(Experiment::lhs_time, dir.path())).files.at(0);
    const auto svg = emit_plot(csv);
    EXPECT_EQ(svg.extension(), ".svg");
    const auto text = slurp(svg);
    EXPECT_EQ(text.rfind("<svg", 0), 0u);
    EXPECT_NE(text.find("</svg>"), std::string::npos);
}

TEST(Plot, RejectsEmptyOrForeignCsv) {
    TempDir dir;
    const auto empty = dir.path() / "empty.csv";
    std::ofstream(empty).flush();
    EXPECT_THROW(emit_plot(empty), FormatError);
    const auto header_only = dir.path() / "header.csv";
    std::ofstream(header_only) << "theta,gs,gt,lhs_signed,lhs_positive_part\n";
    EXPECT_THROW(emit_plot(header_only), FormatError);
    const auto foreign = dir.path() / "foreign.csv";
    std::ofstream(foreign) << "a,b\n1,2\n";
    EXPECT_THROW(emit_plot(foreign), FormatError);
    EXPECT_THROW(emit_plot(foreign, {"a", "b", "zz", "t"}), FormatError);
}

TEST(Csv, RealsRoundTripExactly) {
    for (double x : {0.1, 1.0 / 3, 1e-300, -2.5e17, kPi}) EXPECT_EQ(parse_real_cell(format_real(x)), x);
    EXPECT_EQ(format_real(INFINITY), "inf");
    EXPECT_THROW(parse_real_cell("1.0x"), FormatError);
}

TEST(Pool, VisitsEveryIndexOnceAndPropagatesErrors) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; }, 4);
    for (int h : hits) EXPECT_EQ(h, 1);
    EXPECT_THROW(parallel_for(100, [](std::size_t i) { if (i == 37) throw std::runtime_error("x"); }, 3),
                 std::runtime_error);
}

TEST(Cli, ExitCodes) {
    TempDir dir;
    EXPECT_EQ(run_cli("list"), 0);
    EXPECT_EQ(run_cli("run corr_fraction_qjsd --c 0.9"), 2);
    EXPECT_EQ(run_cli("run no_such_experiment"), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
    const auto blocker = dir.path() / "file";
    std::ofstream(blocker) << "x";
    EXPECT_EQ(run_cli("run corr_time --n 2 --time-points 3 --c-points 2 --out " + (blocker / "sub").string()), 1);
    EXPECT_EQ(run_cli("run corr_time --n 2 --time-points 3 --c-points 2 --out " + (dir.path() / "ok").string()), 0);
    EXPECT_TRUE(fs::exists(dir.path() / "ok" / "corr_time.csv"));
}
