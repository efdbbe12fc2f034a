// dmscope: label-free domain-mismatch estimation for image corpora.
//
// Scores a corpus by reconstruction PSNR, compares the score distribution
// against a stored source-domain reference with the earth mover's distance
// (the DM metric, in dB), and issues a functional-scope verdict against the
// calibrated 2x-validation threshold.
//
// Exit codes are contractual: 0 success/in-scope, 1 I/O error, 2 usage error,
// 3 out-of-domain verdict.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dmscope/imageio.hpp"
#include "dmscope/metrics.hpp"
#include "dmscope/observer.hpp"
#include "dmscope/profile_io.hpp"
#include "dmscope/rankcorr.hpp"
#include "dmscope/synthcorpus.hpp"
#include "dmscope/transport.hpp"

namespace {

using namespace dmscope;
using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

BinningConfig parse_bins(const std::string& spec) {
    double lo = 0, hi = 0, width = 0;
    char sep1 = 0, sep2 = 0;
    std::istringstream in(spec);
    if (!(in >> lo >> sep1 >> hi >> sep2 >> width) || sep1 != ':' || sep2 != ':' ||
        !in.eof()) {
        throw UsageError("--bins expects lo:hi:width, got '" + spec + "'");
    }
    try {
        return BinningConfig(lo, hi, width);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

Reconstructor parse_recon(const std::string& spec) {
    try {
        return Reconstructor::parse(spec);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

std::vector<Image> load_corpus_or_die(const std::string& dir) {
    auto report = load_image_dir(dir);
    for (const auto& [file, reason] : report.failures) {
        std::cerr << "warning: skipping " << file << ": " << reason << "\n";
    }
    if (report.images.empty()) {
        throw std::runtime_error(dir + ": no loadable images");
    }
    return std::move(report.images);
}

std::vector<double> parse_series(const std::string& csv) {
    std::vector<double> values;
    std::istringstream in(csv);
    std::string token;
    while (std::getline(in, token, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw UsageError("bad numeric value '" + token + "' in series");
        }
    }
    return values;
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error(path + ": write failed");
}

// ---- gen-corpus ----

struct GenCorpusOpts {
    std::string images_dir;
    std::string labels_dir;
    std::string kind = "gradient";
    int count = 100;
    int height = 64;
    int width = 64;
    std::uint64_t seed = 0;
    double brightness = 0.0;
    int blur_factor = 1;
    double noise_amplitude = 0.0;
};

int run_gen_corpus(const GenCorpusOpts& o) {
    CorpusSpec spec;
    try {
        spec.kind = parse_corpus_kind(o.kind);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    spec.count = o.count;
    spec.height = o.height;
    spec.width = o.width;
    spec.seed = o.seed;
    spec.shift = ShiftSpec{o.brightness, o.blur_factor, o.noise_amplitude};

    SyntheticCorpus corpus;
    try {
        corpus = generate_corpus(spec);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::optional<std::filesystem::path> labels;
    if (!o.labels_dir.empty()) {
        if (corpus.labels.empty()) {
            std::cerr << "warning: corpus kind '" << o.kind << "' defines no labels; "
                      << "--labels ignored\n";
        } else {
            labels = o.labels_dir;
        }
    }
    write_corpus(corpus, o.images_dir, labels);
    std::cout << "wrote " << corpus.images.size() << " images (" << spec.describe() << ") to "
              << o.images_dir << "\n";
    return 0;
}

// ---- build-reference ----

struct BuildRefOpts {
    std::string images_dir;
    std::string recon;
    std::string bins = "10:45:0.5";
    std::string profile;
    std::string id;
};

int run_build_reference(const BuildRefOpts& o) {
    const Reconstructor recon = parse_recon(o.recon);
    const BinningConfig binning = parse_bins(o.bins);
    const auto images = load_corpus_or_die(o.images_dir);
    const std::string id = o.id.empty() ? o.images_dir : o.id;
    const auto ref = build_reference(images, recon, binning, id);
    save_profile(ref, o.profile);
    std::cout << "reference profile (" << images.size() << " images, " << recon.describe()
              << ") written to " << o.profile << "\n";
    return 0;
}

// ---- calibrate ----

struct CalibrateOpts {
    std::string profile;
    std::string images_dir;
};

int run_calibrate(const CalibrateOpts& o) {
    auto ref = load_profile(o.profile);
    const auto images = load_corpus_or_die(o.images_dir);
    ref = calibrate(std::move(ref), images);
    save_profile(ref, o.profile);
    std::printf("validation_dm=%.2f dB threshold=%.2f dB\n",
                ref.calibration->validation_dm_dB, ref.calibration->threshold_dB);
    return 0;
}

// ---- evaluate ----

struct EvaluateOpts {
    std::string profile;
    std::string images_dir;
    std::string report_path;
    std::string hist_csv;
    std::string flow_csv;
    std::size_t window = 0;  // 0 = single batch
    std::size_t stride = 0;  // 0 = window
    std::size_t min_batch = 30;
    bool fixed_clock = false;
};

void print_report_line(const DmReport& r) {
    if (r.window_index) std::printf("window %zu: ", *r.window_index);
    std::printf("dm=%.2f dB", r.dm_dB);
    if (r.threshold_dB) {
        std::printf(" threshold=%.2f dB", *r.threshold_dB);
    } else {
        std::printf(" threshold=n/a");
    }
    std::printf(" verdict=%s (mean=%.2f dB std=%.2f dB n=%zu)\n",
                std::string(to_string(r.verdict)).c_str(), r.mean_psnr_dB, r.stddev_psnr_dB,
                r.sample_count);
}

int run_evaluate(const EvaluateOpts& o) {
    if (o.window == 0 && o.stride != 0) {
        throw UsageError("--stride requires --window");
    }
    if (o.window != 0 && o.window < 10) {
        throw UsageError("--window must be at least 10");
    }
    const auto ref = load_profile(o.profile);
    const auto images = load_corpus_or_die(o.images_dir);

    ObserverConfig cfg;
    cfg.min_batch_for_verdict = o.min_batch;
    if (o.fixed_clock) cfg.fixed_clock = 0;

    std::vector<DmReport> reports;
    if (o.window > 0) {
        const std::size_t stride = o.stride == 0 ? o.window : o.stride;
        reports = sliding_window_observe(ref, images, o.window, stride, cfg);
    } else {
        reports.push_back(evaluate_batch(ref, images, cfg));
    }

    for (const auto& r : reports) print_report_line(r);
    if (!ref.calibrated()) {
        std::cout << "note: reference is uncalibrated; no functional-scope verdict issued\n";
    }

    if (!o.report_path.empty()) {
        if (reports.size() == 1 && o.window == 0) {
            write_json_file(report_to_json(reports.front()), o.report_path);
        } else {
            json arr = json::array();
            for (const auto& r : reports) arr.push_back(report_to_json(r));
            write_json_file(arr, o.report_path);
        }
    }
    if (!o.hist_csv.empty() || !o.flow_csv.empty()) {
        const auto scores = score_corpus(ref.reconstructor, images, cfg.psnr);
        const auto hist = build_histogram(scores, ref.histogram.binning());
        if (!o.hist_csv.empty()) {
            std::ofstream out(o.hist_csv);
            if (!out) throw std::runtime_error(o.hist_csv + ": cannot open for writing");
            write_histogram_csv(hist, out);
        }
        if (!o.flow_csv.empty()) {
            // diagnostic: the optimal flow behind the DM value
            const DmResult lp = emd_lp(normalize_histogram(ref.histogram),
                                       normalize_histogram(hist),
                                       ref.histogram.binning().width_dB(), /*keep_flow=*/true);
            std::ofstream out(o.flow_csv);
            if (!out) throw std::runtime_error(o.flow_csv + ": cannot open for writing");
            write_flow_csv(*lp.flow, out);
        }
    }

    for (const auto& r : reports) {
        if (r.verdict == Verdict::kOutOfDomain) return 3;
    }
    return 0;
}

// ---- miou ----

struct MiouOpts {
    std::string labels_dir;
    std::string pred_dir;
    int classes = 0;
};

int run_miou(const MiouOpts& o) {
    if (o.classes < 1) throw UsageError("--classes must be >= 1");
    const auto gt = load_labelmap_dir(o.labels_dir, o.classes);
    const auto pred = load_labelmap_dir(o.pred_dir, o.classes);
    if (gt.empty()) throw std::runtime_error(o.labels_dir + ": no label maps");
    if (gt.size() != pred.size()) {
        throw std::runtime_error("gt and pred corpora differ in size (" +
                                 std::to_string(gt.size()) + " vs " +
                                 std::to_string(pred.size()) + ")");
    }
    ConfusionAccumulator acc(o.classes);
    for (std::size_t i = 0; i < gt.size(); ++i) acc.accumulate(gt[i], pred[i]);

    json per_class = json::array();
    for (const auto& iou : per_class_iou(acc)) {
        per_class.push_back(iou ? json(*iou) : json(nullptr));
    }
    json out = {{"miou", miou(acc)}, {"per_class_iou", per_class}, {"classes", o.classes},
                {"images", gt.size()}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

// ---- kendall ----

struct KendallOpts {
    std::string a_csv;
    std::string b_csv;
    std::string csv_file;
    double tie_epsilon = 0.0;
};

PairedSeries kendall_input(const KendallOpts& o) {
    PairedSeries series;
    if (!o.csv_file.empty()) {
        if (!o.a_csv.empty() || !o.b_csv.empty()) {
            throw UsageError("use either --csv or --a/--b, not both");
        }
        std::ifstream in(o.csv_file);
        if (!in) throw std::runtime_error(o.csv_file + ": cannot open");
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::string col_a, col_b;
            if (!std::getline(ls, col_a, ',') || !std::getline(ls, col_b)) {
                throw std::runtime_error(o.csv_file + ": expected two comma-separated columns");
            }
            try {
                series.a.push_back(std::stod(col_a));
                series.b.push_back(std::stod(col_b));
            } catch (const std::exception&) {
                if (first) {  // header line
                    first = false;
                    continue;
                }
                throw std::runtime_error(o.csv_file + ": bad numeric row '" + line + "'");
            }
            first = false;
        }
    } else {
        if (o.a_csv.empty() || o.b_csv.empty()) {
            throw UsageError("kendall needs --a and --b (or --csv FILE)");
        }
        series.a = parse_series(o.a_csv);
        series.b = parse_series(o.b_csv);
    }
    return series;
}

int run_kendall(const KendallOpts& o) {
    const PairedSeries series = kendall_input(o);
    TauResult r;
    try {
        r = kendall_tau(series, o.tie_epsilon);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    } catch (const std::domain_error& e) {
        throw UsageError(e.what());  // degenerate all-tied input
    }
    json out = {{"tau", r.tau}, {"n_c", r.n_c}, {"n_d", r.n_d},
                {"n_a", r.n_a}, {"n_b", r.n_b}, {"n_p", r.n_p}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

// ---- hist-export ----

struct HistExportOpts {
    std::string profile;
    std::string images_dir;
    std::string recon;
    std::string bins = "10:45:0.5";
    std::string hist_csv;
};

int run_hist_export(const HistExportOpts& o) {
    std::optional<PerformanceHistogram> hist;
    if (!o.profile.empty()) {
        hist = load_profile(o.profile).histogram;
    } else if (!o.images_dir.empty()) {
        if (o.recon.empty()) throw UsageError("hist-export from a corpus needs --recon");
        const Reconstructor recon = parse_recon(o.recon);
        const BinningConfig binning = parse_bins(o.bins);
        const auto images = load_corpus_or_die(o.images_dir);
        hist = build_histogram(score_corpus(recon, images), binning);
    } else {
        throw UsageError("hist-export needs --profile or --images");
    }

    if (o.hist_csv.empty()) {
        write_histogram_csv(*hist, std::cout);
    } else {
        std::ofstream out(o.hist_csv);
        if (!out) throw std::runtime_error(o.hist_csv + ": cannot open for writing");
        write_histogram_csv(*hist, out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dmscope: domain-mismatch estimation from reconstruction PSNR histograms"};
    app.require_subcommand(1);
    int rc = 0;

    GenCorpusOpts gen;
    auto* gen_cmd = app.add_subcommand("gen-corpus", "generate a seeded synthetic corpus");
    gen_cmd->add_option("--images", gen.images_dir, "output image directory")->required();
    gen_cmd->add_option("--labels", gen.labels_dir, "output label directory (labeled kinds)");
    gen_cmd->add_option("--kind", gen.kind, "gradient|checker|noise|blotch");
    gen_cmd->add_option("--count", gen.count, "number of images");
    gen_cmd->add_option("--height", gen.height, "image height");
    gen_cmd->add_option("--width", gen.width, "image width");
    gen_cmd->add_option("--seed", gen.seed, "corpus seed");
    gen_cmd->add_option("--brightness", gen.brightness, "shift: brightness offset [-1,1]");
    gen_cmd->add_option("--blur-factor", gen.blur_factor, "shift: blur factor {1,2,4,8}");
    gen_cmd->add_option("--noise-amplitude", gen.noise_amplitude, "shift: noise amplitude");
    gen_cmd->callback([&] { rc = run_gen_corpus(gen); });

    BuildRefOpts build;
    auto* build_cmd = app.add_subcommand("build-reference", "build a source-domain profile");
    build_cmd->add_option("--images", build.images_dir, "training corpus directory")->required();
    build_cmd->add_option("--recon", build.recon, "reconstructor kind[:params]")->required();
    build_cmd->add_option("--bins", build.bins, "binning lo:hi:width (dB)");
    build_cmd->add_option("--profile", build.profile, "output profile JSON")->required();
    build_cmd->add_option("--id", build.id, "reference id (defaults to the corpus dir)");
    build_cmd->callback([&] { rc = run_build_reference(build); });

    CalibrateOpts cal;
    auto* cal_cmd = app.add_subcommand("calibrate", "set the 2x validation-DM threshold");
    cal_cmd->add_option("--profile", cal.profile, "profile JSON to update")->required();
    cal_cmd->add_option("--images", cal.images_dir, "in-domain validation corpus")->required();
    cal_cmd->callback([&] { rc = run_calibrate(cal); });

    EvaluateOpts ev;
    auto* ev_cmd = app.add_subcommand("evaluate", "evaluate a target corpus against a profile");
    ev_cmd->add_option("--profile", ev.profile, "reference profile JSON")->required();
    ev_cmd->add_option("--images", ev.images_dir, "target corpus directory")->required();
    ev_cmd->add_option("--report", ev.report_path, "write DmReport JSON here");
    ev_cmd->add_option("--hist-csv", ev.hist_csv, "write the target histogram CSV here");
    ev_cmd->add_option("--flow-csv", ev.flow_csv, "write the optimal flow (mu,nu,flow) here");
    ev_cmd->add_option("--window", ev.window, "sliding-window size (>= 10)");
    ev_cmd->add_option("--stride", ev.stride, "sliding-window stride (default: window)");
    ev_cmd->add_option("--min-batch", ev.min_batch, "minimum batch size for a verdict");
    ev_cmd->add_flag("--fixed-clock", ev.fixed_clock, "pin report timestamps to 0");
    ev_cmd->callback([&] { rc = run_evaluate(ev); });

    MiouOpts mi;
    auto* mi_cmd = app.add_subcommand("miou", "mean IoU of predictions against ground truth");
    mi_cmd->add_option("--labels", mi.labels_dir, "ground-truth label directory")->required();
    mi_cmd->add_option("--pred", mi.pred_dir, "prediction label directory")->required();
    mi_cmd->add_option("--classes", mi.classes, "class count S")->required();
    mi_cmd->callback([&] { rc = run_miou(mi); });

    KendallOpts ke;
    auto* ke_cmd = app.add_subcommand("kendall", "Kendall tau-b of two paired series");
    ke_cmd->add_option("--a", ke.a_csv, "first series, comma-separated");
    ke_cmd->add_option("--b", ke.b_csv, "second series, comma-separated");
    ke_cmd->add_option("--csv", ke.csv_file, "CSV file with two columns a,b");
    ke_cmd->add_option("--tie-epsilon", ke.tie_epsilon, "absolute tie tolerance (default 0)");
    ke_cmd->callback([&] { rc = run_kendall(ke); });

    HistExportOpts he;
    auto* he_cmd = app.add_subcommand("hist-export", "dump a PSNR histogram as CSV");
    he_cmd->add_option("--profile", he.profile, "profile JSON to export");
    he_cmd->add_option("--images", he.images_dir, "corpus directory to score and export");
    he_cmd->add_option("--recon", he.recon, "reconstructor (with --images)");
    he_cmd->add_option("--bins", he.bins, "binning lo:hi:width (with --images)");
    he_cmd->add_option("--hist-csv", he.hist_csv, "output CSV (default: stdout)");
    he_cmd->callback([&] { rc = run_hist_export(he); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
