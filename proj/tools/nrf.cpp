// nrf: command-line front end for design files.
//
//   nrf sweep    --design F [--out F.csv]   S-parameters, all ports and harmonics
//   nrf metrics  --design F [--out F.txt] [--csv F.csv]
//   nrf converge --design F [--out F.csv] [--nhar-list 3,5,7]
//   nrf optimize --design F [--out log.csv]   appends one row per run
//   nrf oracle   --design F [--out F.csv] [--freqs 960e6,975e6]
//   nrf echo     --design F [--out F.design]
//
// Exit codes: 0 ok, 2 config error, 3 numeric failure, 1 anything else.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "nrf/design.hpp"
#include "nrf/metrics.hpp"
#include "nrf/optimize.hpp"
#include "nrf/oracle.hpp"
#include "nrf/solve.hpp"

namespace fs = std::filesystem;
using namespace nrf;

namespace {

struct Options {
    std::string design;
    std::string out;
    std::string mode;
    int nhar = 0;
    int points = 0;
    std::string csv;
    std::vector<int> nhar_list;
    std::vector<double> freqs;
};

std::string quote(const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') q += '\\';
        q += c == '\n' ? ' ' : c;
    }
    return q + '"';
}

// Output goes to a sibling temp file that is renamed into place only once complete.
class AtomicOutput {
public:
    explicit AtomicOutput(std::string path, bool append = false) : path_(std::move(path)) {
        if (path_.empty() || path_ == "-") return;
        tmp_ = path_ + ".tmp." + std::to_string(::getpid());
        if (append && fs::exists(path_)) fs::copy_file(path_, tmp_, fs::copy_options::overwrite_existing);
        file_.open(tmp_, append ? std::ios::app : std::ios::trunc);
        if (!file_) throw ConfigError("cannot write '" + path_ + "'", 0, "out");
    }
    AtomicOutput(const AtomicOutput&) = delete;
    AtomicOutput& operator=(const AtomicOutput&) = delete;
    ~AtomicOutput() {
        if (!tmp_.empty() && !committed_) {
            file_.close();
            std::error_code ec;
            fs::remove(tmp_, ec);
        }
    }

    std::ostream& stream() { return tmp_.empty() ? std::cout : static_cast<std::ostream&>(file_); }
    bool was_empty() const { return tmp_.empty() || !fs::exists(path_) || fs::file_size(path_) == 0; }

    void commit() {
        if (tmp_.empty()) return;
        file_.close();
        if (!file_) throw ConfigError("failed writing '" + path_ + "'", 0, "out");
        fs::rename(tmp_, path_);
        committed_ = true;
    }

private:
    std::string path_;
    std::string tmp_;
    std::ofstream file_;
    bool committed_ = false;
};

Design load(const Options& o) {
    Design d = load_design(o.design);
    if (!o.mode.empty()) {
        d.mode = parse_mode(o.mode);
        if (d.optimize) d.optimize->mode = d.mode;
    }
    if (o.nhar != 0) {
        if (!d.modulation) throw ConfigError("--nhar needs a [modulation] section", 0, "nhar");
        d.modulation->harmonics = o.nhar;
        d.modulation->validate(d.order);
        if (d.optimize) d.optimize->harmonics = o.nhar;
    }
    if (o.points != 0) d.grid.points = o.points;
    if (d.modulation) d.grid.validate_for(*d.modulation, d.mode);
    else d.grid.validate();
    return d;
}

SParamSet run_sweep(const Design& d) { return sweep_elements(d.elements(), d.modulation, d.grid, d.mode); }

int cmd_sweep(const Options& o) {
    const auto d = load(o);
    const auto s = run_sweep(d);
    AtomicOutput out(o.out);
    write_sparams_csv(out.stream(), s);
    out.commit();
    return 0;
}

int cmd_metrics(const Options& o) {
    const auto d = load(o);
    const auto elems = d.elements();
    const auto s = sweep_elements(elems, d.modulation, d.grid, d.mode);
    auto m = compute_metrics(s, d.bandpass.f0_hz, d.rl_level_db, d.d_level_db);
    if (d.modulation) {
        auto next = *d.modulation;
        next.harmonics += 2;
        const auto step = compare_sweeps(s, sweep_elements(elems, next, d.grid, d.mode));
        m.delta_s_max_db = step.max_delta_db;
        m.converged = step.max_delta_db < 0.1;
    }
    AtomicOutput report(o.out);
    std::optional<AtomicOutput> csv;
    if (!o.csv.empty()) {
        csv.emplace(o.csv);
        write_metrics_csv(csv->stream(), m);
    }
    write_metrics_report(report.stream(), m);
    report.commit();
    if (csv) csv->commit();
    return 0;
}

int cmd_converge(const Options& o) {
    const auto d = load(o);
    if (!d.modulation) throw ConfigError("converge needs a [modulation] section", 0, "modulation");
    const auto list = o.nhar_list.empty() ? d.convergence_harmonics : o.nhar_list;
    if (list.size() < 2) throw ConfigError("converge needs at least two harmonic counts", 0, "nhar-list");
    const auto steps = convergence_study(d.matrix(), d.bandpass, *d.modulation, d.grid, d.mode, d.impairments, list);
    AtomicOutput out(o.out);
    write_convergence_csv(out.stream(), steps);
    out.commit();
    return 0;
}

int cmd_optimize(const Options& o) {
    const auto d = load(o);
    if (!d.optimize) throw ConfigError("optimize needs an [optimize] section", 0, "optimize");
    const auto r = optimize_modulation(d.matrix(), d.bandpass, *d.optimize, d.impairments, d.grid);
    AtomicOutput out(o.out, true);
    write_optimize_log(out.stream(), r, out.was_empty());
    out.commit();
    return 0;
}

int cmd_oracle(const Options& o) {
    const auto d = load(o);
    const auto elems = d.elements();
    const auto mod = d.modulation.value_or(ModulationSpec::none(d.order));
    auto reference = mod;
    reference.harmonics = std::max(d.oracle.reference_harmonics, d.oracle.harmonics);
    const auto freqs = o.freqs.empty() ? oracle_frequencies(d) : o.freqs;

    std::ostringstream csv;
    csv << "f_hz,f_snapped_hz,parameter,fd_mag,td_mag,delta_db\n";
    for (double f : freqs) {
        TransientConfig cfg;
        cfg.source_hz = f;
        cfg.harmonics = d.oracle.harmonics;
        cfg.samples_per_period = d.oracle.samples_per_period;
        const auto fwd = transient_sparams(elems, mod, cfg);
        cfg.excite = Port::p2;
        const auto bwd = transient_sparams(elems, mod, cfg);
        const SPoint fd = d.modulation ? evaluate(elems, reference, Mode::rigorous, fwd.source_hz)
                                       : evaluate(elems, std::nullopt, Mode::rigorous, fwd.source_hz);
        const int K = fwd.half_width();
        const int Kfd = fd.half_width();
        for (const TransientResult* tr : {&fwd, &bwd}) {
            const Port a = tr->excite;
            for (Port b : {Port::p1, Port::p2}) {
                for (int k = -K; k <= K; ++k) {
                    const double td = b == a ? tr->reflected(k) : tr->transmitted(k);
                    const double ref = std::abs(k <= Kfd && k >= -Kfd ? fd(b, a, k) : cplx{});
                    const double delta = 20.0 * std::log10(std::max(td, 1e-15) / std::max(ref, 1e-15));
                    csv << format_double(f) << ',' << format_double(tr->source_hz) << ',' << sparam_name(b, a, k)
                        << ',' << format_double(ref) << ',' << format_double(td) << ',' << format_double(delta)
                        << '\n';
                }
            }
        }
    }
    AtomicOutput out(o.out);
    out.stream() << csv.str();
    out.commit();
    return 0;
}

int cmd_echo(const Options& o) {
    const auto d = load(o);
    AtomicOutput out(o.out);
    write_design(out.stream(), d);
    out.commit();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-reciprocal time-modulated filter analysis"};
    app.require_subcommand(1);
    Options o;
    std::function<int(const Options&)> action;

    auto common = [&](CLI::App* sub, std::function<int(const Options&)> fn, const std::string& out_help) {
        sub->add_option("--design", o.design, "Design file")->required();
        sub->add_option("--out", o.out, out_help + " (default stdout)");
        sub->add_option("--mode", o.mode, "Override analysis mode: rigorous | cm");
        sub->add_option("--nhar", o.nhar, "Override harmonic count (odd)");
        sub->add_option("--points", o.points, "Override sweep points");
        sub->callback([&action, fn] { action = fn; });
        return sub;
    };
    common(app.add_subcommand("sweep", "Frequency sweep to CSV"), cmd_sweep, "CSV path");
    auto* metrics = common(app.add_subcommand("metrics", "Figures of merit"), cmd_metrics, "Report path");
    metrics->add_option("--csv", o.csv, "Also write one CSV row");
    auto* converge = common(app.add_subcommand("converge", "Harmonic convergence table"), cmd_converge, "CSV path");
    converge->add_option("--nhar-list", o.nhar_list, "Harmonic counts, e.g. 3,5,7,9")->delimiter(',');
    common(app.add_subcommand("optimize", "Search modulation parameters"), cmd_optimize, "Run-log CSV (appended)");
    auto* oracle = common(app.add_subcommand("oracle", "Transient cross-check"), cmd_oracle, "CSV path");
    oracle->add_option("--freqs", o.freqs, "Frequencies in Hz")->delimiter(',');
    common(app.add_subcommand("echo", "Print the canonical design"), cmd_echo, "Design path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error kind=usage message=" << quote(e.what()) << '\n';
        return 2;
    }

    try {
        return action(o);
    } catch (const ConfigError& e) {
        std::cerr << "error kind=config line=" << e.line() << " key=" << (e.key().empty() ? "-" : e.key())
                  << " message=" << quote(e.what()) << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error kind=numeric frequency_hz=" << format_double(e.frequency_hz()) << " module=" << e.module()
                  << " message=" << quote(e.what()) << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error kind=internal message=" << quote(e.what()) << '\n';
        return 1;
    }
}
