#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nsc/nsc.h"

namespace {

enum Exit { exit_ok = 0, exit_compute = 1, exit_usage = 2, exit_io = 3 };

struct Failure {
    nsc_status status;
    std::string message;
};

void check(nsc_status s)
{
    if (s != NSC_OK) {
        throw Failure{s, nsc_last_error()};
    }
}

int exit_code(nsc_status s)
{
    switch (s) {
    case NSC_ERR_IO:
    case NSC_ERR_PARSE:
        return exit_io;
    case NSC_ERR_INVALID_ARGUMENT:
    case NSC_ERR_UNKNOWN_PRESET:
        return exit_usage;
    default:
        return exit_compute;
    }
}

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};

using Meta = std::unique_ptr<nsc_meta, Deleter<nsc_meta, nsc_meta_free>>;
using Data = std::unique_ptr<nsc_dataset, Deleter<nsc_dataset, nsc_dataset_free>>;
using Sim = std::unique_ptr<nsc_simulation, Deleter<nsc_simulation, nsc_simulation_free>>;
using Curve = std::unique_ptr<nsc_curve, Deleter<nsc_curve, nsc_curve_free>>;
using Budget = std::unique_ptr<nsc_budget, Deleter<nsc_budget, nsc_budget_free>>;

std::string command_line;

Meta metadata(std::initializer_list<std::pair<std::string, std::string>> items)
{
    Meta meta(nsc_meta_new());
    check(nsc_meta_add(meta.get(), "command", command_line.c_str()));
    for (const auto& [k, v] : items) {
        check(nsc_meta_add(meta.get(), k.c_str(), v.c_str()));
    }
    return meta;
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Data load(const std::string& path, double tau0)
{
    nsc_dataset* raw = nullptr;
    check(nsc_dataset_read_csv(path.c_str(), tau0, &raw));
    return Data(raw);
}

// Seed of the data a curve came from, carried into derived files.
std::string source_seed(const nsc_dataset* data)
{
    const char* seed = nsc_dataset_meta(data, "seed");
    return seed ? seed : "none";
}

struct CurveFlags {
    std::string style = "overlap";
    std::string variant = "nsc";
    std::string noise = "auto";

    nsc_curve_options options() const
    {
        nsc_curve_options o = nsc_curve_options_default();
        o.style = style == "normal" ? NSC_STYLE_NORMAL : NSC_STYLE_OVERLAP;
        o.variant = variant == "nsc" ? NSC_VARIANT_NSC : NSC_VARIANT_NSC_D;
        if (noise == "wfn") {
            o.noise = NSC_NOISE_WFN;
        } else if (noise == "ffn") {
            o.noise = NSC_NOISE_FFN;
        } else if (noise == "rwn") {
            o.noise = NSC_NOISE_RWN;
        } else {
            o.noise = NSC_NOISE_AUTO;
        }
        return o;
    }
};

void add_curve_flags(CLI::App* cmd, CurveFlags& f)
{
    cmd->add_option("--style", f.style, "Allan estimator")
        ->check(CLI::IsMember({"overlap", "normal"}))
        ->capture_default_str();
    cmd->add_option("--variant", f.variant, "nsc, or nscd to difference both records first")
        ->transform(CLI::Transformer({{"nsc_d", "nscd"}, {"nsc-d", "nscd"}}))
        ->check(CLI::IsMember({"nsc", "nscd"}))
        ->capture_default_str();
    cmd->add_option("--noise", f.noise, "noise type of x for error bars")
        ->check(CLI::IsMember({"auto", "wfn", "ffn", "rwn"}))
        ->capture_default_str();
}

const char* noise_name(nsc_noise n)
{
    switch (n) {
    case NSC_NOISE_WFN: return "wfn";
    case NSC_NOISE_FFN: return "ffn";
    case NSC_NOISE_RWN: return "rwn";
    default: return "none";
    }
}

void print_curve(const nsc_curve* curve)
{
    std::printf("%10s %14s %14s %14s %12s\n", "m", "tau", "k", "sigma_k", "edf");
    for (std::size_t i = 0; i < nsc_curve_size(curve); ++i) {
        nsc_curve_point p;
        check(nsc_curve_point_at(curve, i, &p));
        std::printf("%10zu %14.6g %14.6g %14.6g %12.6g\n", p.m, p.tau, p.k, p.sigma_k, p.edf);
    }
    std::printf("noise kind: %s; %zu point(s) omitted\n", noise_name(nsc_curve_noise(curve)),
                nsc_curve_omitted(curve));
}

} // namespace

int main(int argc, char** argv)
{
    for (int i = 0; i < argc; ++i) {
        command_line += (i ? " " : "") + std::string(i ? argv[i] : "nsc");
    }

    CLI::App app{"Frequency sensitivity coefficients from Allan covariance"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(nsc_version()));

    std::string preset;
    std::string config;
    double scale = 1.0;
    std::uint64_t seed = 1;
    std::string out_dir;
    auto* sim = app.add_subcommand("simulate", "Write a simulated record and its truth file");
    auto* preset_opt = sim->add_option("--preset", preset, "named scenario");
    auto* config_opt = sim->add_option("--config", config, "scenario config file")->check(CLI::ExistingFile);
    preset_opt->excludes(config_opt);
    sim->add_option("--scale", scale, "record length factor in (0, 1]")->capture_default_str();
    sim->add_option("--seed", seed, "master seed for presets")->capture_default_str();
    sim->add_option("--out", out_dir, "output directory")->required();

    std::string in;
    std::string col;
    double tau0 = 0.0;
    std::string stats_style = "overlap";
    auto* stats = app.add_subcommand("stats", "Allan deviation of one column over the standard grid");
    stats->add_option("--in", in, "input CSV")->required();
    stats->add_option("--col", col, "column name")->required();
    stats->add_option("--style", stats_style)->check(CLI::IsMember({"overlap", "normal"}))->capture_default_str();

    std::string y_col;
    std::string x_col;
    std::string out;
    CurveFlags flags;
    auto* kc = app.add_subcommand("kcurve", "K(tau) curve of y against one NIV");
    kc->add_option("--in", in, "input CSV")->required();
    kc->add_option("--y", y_col, "frequency column")->required();
    kc->add_option("--x", x_col, "NIV column")->required();
    kc->add_option("--out", out, "curve CSV")->required();
    add_curve_flags(kc, flags);

    nsc_compensation search = nsc_compensation_default();
    int dmax = 32;
    std::size_t imax = 32;
    std::optional<int> dmin;
    auto* comp = app.add_subcommand("compensate", "Search delay and integral window, then write the aligned curve");
    comp->add_option("--in", in, "input CSV")->required();
    comp->add_option("--y", y_col, "frequency column")->required();
    comp->add_option("--x", x_col, "NIV column")->required();
    comp->add_option("--dmax", dmax, "largest delay in samples")->capture_default_str();
    comp->add_option("--dmin", dmin, "smallest delay (default -dmax)");
    comp->add_option("--imax", imax, "longest integral window in samples")->capture_default_str();
    comp->add_option("--out", out, "curve CSV (default compensated_curve.csv beside the input)");
    add_curve_flags(comp, flags);

    std::string curve_path;
    auto* est = app.add_subcommand("estimate", "Scalar K with uncertainty from a curve file");
    est->add_option("--curve", curve_path, "curve CSV")->required();

    std::string spec;
    auto* bud = app.add_subcommand("budget", "Type-B uncertainty from a budget config");
    bud->add_option("--spec", spec, "budget config")->required();

    for (auto* cmd : {kc, comp, stats}) {
        cmd->add_option("--tau0", tau0, "override the file's tau0 in seconds");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        std::fprintf(stderr, "error[usage]: %s\n", e.what());
        std::fprintf(stderr, "%s", app.help().c_str());
        return exit_usage;
    }

    try {
        if (*sim) {
            if (preset.empty() == config.empty()) {
                std::fprintf(stderr, "error[usage]: simulate needs exactly one of --preset or --config\n");
                return exit_usage;
            }
            nsc_simulation* raw = nullptr;
            if (!preset.empty()) {
                check(nsc_simulate_preset(preset.c_str(), scale, seed, &raw));
            } else {
                check(nsc_simulate_config(config.c_str(), &raw));
            }
            const Sim s(raw);
            const std::string used = std::to_string(nsc_simulation_seed(s.get()));
            std::error_code ec;
            std::filesystem::create_directories(out_dir, ec);
            if (ec) {
                throw Failure{NSC_ERR_IO, "cannot create '" + out_dir + "': " + ec.message()};
            }
            const std::string data_path = (std::filesystem::path(out_dir) / "data.csv").string();
            const std::string truth_path = (std::filesystem::path(out_dir) / "truth.cfg").string();
            const Meta meta = metadata({{"seed", used},
                                        {"scenario", preset.empty() ? config : preset},
                                        {"scale", preset.empty() ? "1" : num(scale)}});
            check(nsc_dataset_write_csv(nsc_simulation_data(s.get()), data_path.c_str(), meta.get()));
            check(nsc_simulation_write_truth(s.get(), truth_path.c_str(), meta.get()));
            const nsc_dataset* d = nsc_simulation_data(s.get());
            std::printf("seed: %s\n", used.c_str());
            std::printf("samples: %zu\n", nsc_dataset_rows(d));
            std::string cols;
            for (std::size_t i = 0; i < nsc_dataset_columns(d); ++i) {
                cols += (i ? "," : "") + std::string(nsc_dataset_column_name(d, i));
            }
            std::printf("columns: %s\n", cols.c_str());
            std::printf("wrote %s\nwrote %s\n", data_path.c_str(), truth_path.c_str());
        } else if (*stats) {
            const Data d = load(in, tau0);
            const double* values = nullptr;
            std::size_t n = 0;
            check(nsc_dataset_column(d.get(), col.c_str(), &values, &n));
            std::vector<std::size_t> m(128);
            std::vector<double> adev(128);
            std::size_t count = 0;
            check(nsc_adev_table(values, n, stats_style == "normal" ? NSC_STYLE_NORMAL : NSC_STYLE_OVERLAP,
                                 m.data(), adev.data(), m.size(), &count));
            const double t0 = nsc_dataset_tau0(d.get());
            std::printf("%10s %14s %14s\n", "m", "tau", "adev");
            for (std::size_t i = 0; i < count; ++i) {
                std::printf("%10zu %14.6g %14.6g\n", m[i], m[i] * t0, adev[i]);
            }
        } else if (*kc) {
            const Data d = load(in, tau0);
            const nsc_curve_options o = flags.options();
            nsc_curve* raw = nullptr;
            check(nsc_kcurve(d.get(), y_col.c_str(), x_col.c_str(), &o, &raw));
            const Curve c(raw);
            const Meta meta = metadata({{"source", in}, {"seed", source_seed(d.get())}});
            check(nsc_curve_write(c.get(), out.c_str(), meta.get()));
            print_curve(c.get());
            std::printf("wrote %s\n", out.c_str());
        } else if (*comp) {
            const Data d = load(in, tau0);
            search.delay_min = dmin.value_or(-dmax);
            search.delay_max = dmax;
            search.integral_min = 1;
            search.integral_max = imax;
            const nsc_curve_options o = flags.options();
            nsc_curve* raw = nullptr;
            check(nsc_compensate(d.get(), y_col.c_str(), x_col.c_str(), &o, &search, &raw));
            const Curve c(raw);
            if (out.empty()) {
                out = (std::filesystem::path(in).parent_path() / "compensated_curve.csv").string();
            }
            const Meta meta = metadata({{"source", in},
                                        {"seed", source_seed(d.get())},
                                        {"delay", std::to_string(search.delay)},
                                        {"integral", std::to_string(search.integral)}});
            check(nsc_curve_write(c.get(), out.c_str(), meta.get()));
            std::printf("best: D = %d, I = %zu (score %.6g, %zu candidates, %zu degenerate)\n", search.delay,
                        search.integral, search.score, search.evaluated, search.degenerate);
            print_curve(c.get());
            std::printf("wrote %s\n", out.c_str());
        } else if (*est) {
            nsc_curve* raw = nullptr;
            check(nsc_curve_read(curve_path.c_str(), &raw));
            const Curve c(raw);
            nsc_estimate e;
            check(nsc_extract(c.get(), &e));
            std::printf("%12s %12s %12s %12s  %s\n", "K", "sigma_bar", "sigma_max", "sigma_total", "window");
            std::printf("%12.6g %12.6g %12.6g %12.6g  tau %g..%g (m %zu..%zu, %zu points)\n", e.k_bar, e.sigma_bar,
                        e.sigma_max, e.sigma_total, e.tau_lo, e.tau_hi, e.m_lo, e.m_hi, e.count);
            std::printf("rule: windows span a decade; every point within the central third's mean k +- mean "
                        "sigma_k; smallest mean sigma_k wins\n");
        } else if (*bud) {
            nsc_budget* raw = nullptr;
            check(nsc_budget_read(spec.c_str(), &raw));
            const Budget b(raw);
            std::printf("%-20s %14s %14s %14s\n", "effect", "k", "sigma_x", "k*sigma_x");
            for (std::size_t i = 0; i < nsc_budget_size(b.get()); ++i) {
                const char* name = nullptr;
                double k = 0.0;
                double sx = 0.0;
                double contribution = 0.0;
                check(nsc_budget_entry(b.get(), i, &name, &k, &sx, &contribution));
                std::printf("%-20s %14.6g %14.6g %14.6g\n", name, k, sx, contribution);
            }
            std::printf("u_B = %.6g\n", nsc_budget_u_b(b.get()));
        }
    } catch (const Failure& f) {
        std::fprintf(stderr, "error[%s]: %s\n", nsc_status_name(f.status), f.message.c_str());
        return exit_code(f.status);
    }
    return exit_ok;
}
