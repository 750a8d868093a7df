// ymhlab: command line front end for the lattice Yang-Mills-Higgs experiments.
//
//   ymhlab <command> [--config FILE] [--set key=value]... [--out DIR]
//                    [--seed N] [--threads N] [--strict]
//
// Exit codes: 0 success, 2 bad configuration or input, 3 numerical failure,
// 4 acceptance check failed (only with --strict).

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "experiments.hpp"
#include "ymh/kernels.hpp"
#include "ymh/snapshot.hpp"

namespace fs = std::filesystem;
using namespace ymhlab;

namespace {

constexpr const char* kVersion = "ymhlab 1.0.0";

struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    long long seed = -1;
    int threads = 1;
    bool strict = false;
};

class Output {
public:
    explicit Output(std::string dir) : dir_(std::move(dir)) {
        if (!dir_.empty()) fs::create_directories(dir_);
    }
    bool enabled() const { return !dir_.empty(); }
    fs::path path(const std::string& name) const { return fs::path(dir_) / name; }

    void text(const std::string& name, const std::string& body) {
        if (!enabled()) return;
        std::ofstream os(path(name), std::ios::binary);
        if (!os) throw ymh::InvalidArgument("cannot write " + path(name).string());
        os << body;
        files_.push_back(name);
    }
    void snapshot(const std::string& name, const ymh::PairState& p) {
        if (!enabled()) return;
        ymh::write_snapshot(p, path(name));
        files_.push_back(name);
    }
    void finish() {
        if (!enabled()) return;
        std::string manifest;
        for (const auto& f : files_) manifest += sha256_file(path(f)) + "  " + f + "\n";
        std::ofstream(path("manifest.sha256"), std::ios::binary) << manifest;
    }

private:
    static std::string sha256_file(const fs::path& p) {
        std::ifstream is(p, std::ios::binary);
        std::vector<char> buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        if (EVP_Digest(buf.data(), buf.size(), md, &len, EVP_sha256(), nullptr) != 1)
            throw ymh::Error("SHA-256 digest failed");
        std::ostringstream hex;
        for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
        return hex.str();
    }

    std::string dir_;
    std::vector<std::string> files_;
};

Resolved resolve(const Common& c, const Schema& schema) {
    Config cfg = c.config.empty() ? Config{} : Config::load(c.config);
    for (const auto& kv : c.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(' '));
            s.erase(s.find_last_not_of(' ') + 1);
            return s;
        };
        cfg.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    if (c.seed >= 0)
        for (const auto& e : schema)
            if (e.key.size() >= 5 && e.key.compare(e.key.size() - 5, 5, ".seed") == 0) cfg.set(e.key, std::to_string(c.seed));
    return Resolved(cfg, schema);
}

std::string stamp() {
    return std::string(kVersion) + "\nkernels " + std::string(ymh::kernels::isa_name(ymh::kernels::active_isa())) + "\n";
}

void begin(Output& out, const Resolved& r) {
    out.text("config.resolved", r.dump());
    out.text("VERSION", stamp());
}

int verdict(bool pass, const Common& c) {
    std::cout << (pass ? "result: pass\n" : "result: FAIL\n");
    return pass || !c.strict ? 0 : 4;
}

int cmd_vortex(const Common& c) {
    const Resolved r = resolve(c, vortex_schema());
    Output out(c.out);
    begin(out, r);
    const VortexResult res = run_vortex(vortex_spec(r));
    std::cout << res.table();
    out.text("vortex.csv", res.table());
    for (const auto& p : res.profiles) {
        std::ostringstream os;
        ymh::write_profile_csv(p, os);
        out.text("profile_k" + std::to_string(p.k()) + ".csv", os.str());
    }
    out.finish();
    return verdict(res.pass, c);
}

int cmd_minimize(const Common& c) {
    const Resolved r = resolve(c, minimize_schema());
    Output out(c.out);
    begin(out, r);
    const MinimizeResult res = run_minimize(minimize_spec(r));
    std::cout << res.table();
    std::cout << "energy_ok " << res.energy_ok << " monotone_trend " << res.monotone_trend << " current_ok "
              << res.current_ok << " liminf_ok " << res.liminf_ok << "\n";
    out.text("minimize.csv", res.table());
    out.text("liminf.csv", res.liminf_table());
    for (std::size_t i = 0; i < res.levels.size(); ++i) {
        const auto& l = res.levels[i];
        const std::string tag = "eps" + std::to_string(i);
        out.text("trajectory_" + tag + ".csv", l.trajectory_csv);
        out.text("current_" + tag + ".csv", l.current.to_csv());
        out.snapshot("final_" + tag + ".ymh", l.final_state);
    }
    out.finish();
    return verdict(res.pass(), c);
}

int cmd_gamma(const Common& c) {
    const Resolved r = resolve(c, gamma_schema());
    Output out(c.out);
    begin(out, r);
    const GammaSpec spec = gamma_spec(r);
    const GammaResult res = run_gamma(spec);
    std::cout << res.table();
    out.text("recovery.csv", res.table());
    bool pass = res.recovery_ok;
    if (spec.run_liminf) {
        std::cout << res.liminf.table();
        out.text("liminf_levels.csv", res.liminf.table());
        out.text("liminf.csv", res.liminf.liminf_table());
        pass = pass && res.liminf.liminf_ok;
    }
    out.finish();
    return verdict(pass, c);
}

int cmd_monotonicity(const Common& c) {
    const Resolved r = resolve(c, monotonicity_schema());
    Output out(c.out);
    begin(out, r);
    const MonotonicityResult res = run_monotonicity(monotonicity_spec(r));
    for (const auto& p : res.psi) std::cout << "psi eps " << p.eps << " cells " << p.cells << " ratio " << p.psi_ratio << "\n";
    for (const auto& d : res.density)
        std::cout << "density eps " << d.eps << " cells " << d.cells << " max/2pi " << d.table.max / ymh::kTwoPi << "\n";
    out.text("monotonicity.csv", res.table());
    out.finish();
    return verdict(res.psi_ok && res.density_ok, c);
}

int cmd_width(const Common& c) {
    const Resolved r = resolve(c, width_schema());
    Output out(c.out);
    begin(out, r);
    const WidthResult res = run_width(width_spec(r));
    std::cout << res.table();
    std::cout << "max_energy " << res.max_energy << " width " << res.width.width
              << (res.width.lower_bound_only ? " (lower bound)" : "") << " 2piW " << ymh::kTwoPi * res.width.width
              << "\nfamily class ";
    for (long v : res.family_class) std::cout << v << " ";
    std::cout << "(" << res.class_note << ")\n";
    out.text("width.csv", res.table());
    out.finish();
    return verdict(res.ledger_ok, c);
}

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ymh::InvalidArgument("cannot read " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int cmd_flatnorm(const Common& c) {
    const Resolved r = resolve(c, flatnorm_schema());
    Output out(c.out);
    begin(out, r);
    const int n = static_cast<int>(r.integer("flatnorm.n"));
    if (n != 2 && n != 3) throw ConfigError("flatnorm.n must be 2 or 3");
    const std::vector<int> dims(n, static_cast<int>(r.integer("flatnorm.cells")));
    const std::vector<double> lengths(n, r.real("flatnorm.length"));
    const std::vector<double> flux(n == 2 ? 1 : 3, 0.0);
    const ymh::LatticeHandle lat = ymh::make_grid(n, dims, lengths, flux);
    const int dim = static_cast<int>(r.integer("flatnorm.dim"));
    const bool dual = r.flag("flatnorm.dual");
    if (r.text("flatnorm.S").empty()) throw ConfigError("flatnorm.S must name a current CSV file");
    const ymh::CubicalCurrent S = read_current_csv(slurp(r.text("flatnorm.S")), lat, dim, dual);
    const ymh::CubicalCurrent T = r.text("flatnorm.T").empty() ? ymh::CubicalCurrent(lat, dim, dual)
                                                                : read_current_csv(slurp(r.text("flatnorm.T")), lat, dim, dual);
    ymh::FlatNormOptions opt;
    opt.fill_in = r.flag("flatnorm.fill_in");
    opt.force_simplex = r.flag("flatnorm.simplex");
    const ymh::FlatNormResult res = ymh::flat_norm(S, T, opt);
    std::cout << "flat_norm " << std::setprecision(12) << res.value << "\nmass_P " << ymh::mass(res.P) << "\nmass_Q "
              << ymh::mass(res.Q) << "\nintegral " << res.integral << "\nmethod " << res.method << "\n";
    out.text("P.csv", res.P.to_csv());
    out.text("Q.csv", res.Q.to_csv());
    out.finish();
    return 0;
}

int cmd_info() {
    std::cout << stamp();
    for (const auto& [name, schema] :
         {std::pair{"vortex", vortex_schema()}, std::pair{"minimize", minimize_schema()}, std::pair{"gamma", gamma_schema()},
          std::pair{"monotonicity", monotonicity_schema()}, std::pair{"width", width_schema()},
          std::pair{"flatnorm", flatnorm_schema()}}) {
        std::cout << "\n[" << name << "]\n";
        for (const auto& e : schema) std::cout << "  " << e.key << " = " << e.default_value << "    # " << e.help << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lattice Yang-Mills-Higgs experiments"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Common common;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "key = value configuration file");
        sub->add_option("--set", common.sets, "override one key (key=value); repeatable");
        sub->add_option("--out", common.out, "output directory");
        sub->add_option("--seed", common.seed, "override every seed key");
        sub->add_option("--threads", common.threads, "worker threads (stepping is serial)")->check(CLI::PositiveNumber);
        sub->add_flag("--strict", common.strict, "exit with status 4 when an acceptance check fails");
    };
    std::vector<std::pair<CLI::App*, int (*)(const Common&)>> subs = {
        {app.add_subcommand("vortex", "radial vortex profiles and energies"), cmd_vortex},
        {app.add_subcommand("minimize", "gradient flow to a minimizer in a flux sector"), cmd_minimize},
        {app.add_subcommand("gamma", "recovery sequence and liminf ledger on T^3"), cmd_gamma},
        {app.add_subcommand("monotonicity", "weighted energy monotonicity and density ratios"), cmd_monotonicity},
        {app.add_subcommand("width", "sweep-out energies against the discrete width"), cmd_width},
        {app.add_subcommand("flatnorm", "flat distance between two cubical currents"), cmd_flatnorm},
    };
    for (auto& [sub, fn] : subs) add_common(sub);
    CLI::App* info = app.add_subcommand("info", "version, kernels and configuration keys");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (info->parsed()) return cmd_info();
        for (auto& [sub, fn] : subs)
            if (sub->parsed()) return fn(common);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ymh::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 2;
    } catch (const ymh::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
