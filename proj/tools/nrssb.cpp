// nrssb: 5G NR SSB generation, cell search, and blind beam index detection
// benchmark CLI. Subcommands: capture, train, sweep, selector-sim, ingest, report.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "nrssb/bench/experiment.hpp"
#include "nrssb/bench/iq_file.hpp"

namespace fs = std::filesystem;
using namespace nrssb;

namespace {

struct CommonOpts {
    std::string config_path;
    bool desk = false;
    uint64_t seed = 1;
    double snr_db = 0.0;
    std::string mode = "beam";
    int taps = 4;
    int nid1 = 100;
    int nid2 = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "key = value config file");
    cmd->add_flag("--desk", opts.desk, "small 256-FFT numerology for fast runs");
    cmd->add_option("--seed", opts.seed, "experiment seed");
    cmd->add_option("--snr", opts.snr_db, "DMRS SNR in dB");
    cmd->add_option("--mode", opts.mode, "channel mode: awgn or beam");
    cmd->add_option("--taps", opts.taps, "beam signature taps");
    cmd->add_option("--nid1", opts.nid1, "cell N_ID^1");
    cmd->add_option("--nid2", opts.nid2, "cell N_ID^2");
}

bench::KvConfig load_kv(const CommonOpts& opts) {
    bench::KvConfig kv;
    if (!opts.config_path.empty()) kv = bench::KvConfig::from_file(opts.config_path);
    return kv;
}

phy::FrameConfig parse_frame(const bench::KvConfig& kv, bool desk) {
    phy::FrameConfig frame = desk ? phy::FrameConfig::desk() : phy::FrameConfig{};
    frame.sample_rate = kv.num("sample_rate", frame.sample_rate);
    frame.scs = kv.num("scs", frame.scs);
    frame.fft_size = static_cast<int>(kv.integer("fft_size", frame.fft_size));
    frame.cp_len = static_cast<int>(kv.integer("cp_len", frame.cp_len));
    frame.lmax = static_cast<int>(kv.integer("lmax", frame.lmax));
    frame.ssb_period_ms = kv.num("ssb_period_ms", frame.ssb_period_ms);
    frame.buffer_duration = kv.num("buffer_duration", frame.buffer_duration);
    if (kv.has("burst_positions")) {
        frame.burst_positions.clear();
        for (double p : kv.num_list("burst_positions", {}))
            frame.burst_positions.push_back(static_cast<int>(p));
    }
    frame.validate();
    return frame;
}

bench::ScenarioSpec parse_scenario(const bench::KvConfig& kv, const CommonOpts& opts) {
    bench::ScenarioSpec spec;
    spec.seed = static_cast<uint64_t>(kv.integer("scenario_seed", static_cast<long>(opts.seed)));
    const std::string mode = kv.str("mode", opts.mode);
    if (mode == "awgn") {
        spec.mode = chansim::ChannelMode::awgn_only;
    } else if (mode == "beam") {
        spec.mode = chansim::ChannelMode::beam_signature;
    } else {
        throw config_error("mode must be awgn or beam, got: " + mode);
    }
    spec.snr_db = kv.num("snr_db", opts.snr_db);
    spec.taps = static_cast<int>(kv.integer("taps", opts.taps));
    spec.timing_offset = static_cast<int>(kv.integer("timing_offset", 0));
    spec.cfo_hz = kv.num("cfo_hz", 0.0);
    return spec;
}

void write_resolved(const bench::KvConfig& kv, const phy::FrameConfig& frame,
                    const bench::ScenarioSpec& spec, const CommonOpts& opts,
                    const std::string& path) {
    bench::KvConfig resolved = kv;
    resolved.set("sample_rate", std::to_string(frame.sample_rate));
    resolved.set("scs", std::to_string(frame.scs));
    resolved.set("fft_size", std::to_string(frame.fft_size));
    resolved.set("cp_len", std::to_string(frame.cp_len));
    resolved.set("lmax", std::to_string(frame.lmax));
    resolved.set("ssb_period_ms", std::to_string(frame.ssb_period_ms));
    resolved.set("buffer_duration", std::to_string(frame.buffer_duration));
    resolved.set("mode", spec.mode == chansim::ChannelMode::awgn_only ? "awgn" : "beam");
    resolved.set("snr_db", std::to_string(spec.snr_db));
    resolved.set("taps", std::to_string(spec.taps));
    resolved.set("scenario_seed", std::to_string(spec.seed));
    resolved.set("seed", std::to_string(opts.seed));
    resolved.set("nid1", std::to_string(opts.nid1));
    resolved.set("nid2", std::to_string(opts.nid2));
    resolved.write(path);
}

int cmd_capture(const CommonOpts& opts, const std::string& out_path, size_t count) {
    const auto kv = load_kv(opts);
    bench::CaptureConfig cap;
    cap.frame = parse_frame(kv, opts.desk);
    cap.scenario = parse_scenario(kv, opts);
    cap.nid1 = static_cast<int>(kv.integer("nid1", opts.nid1));
    cap.nid2 = static_cast<int>(kv.integer("nid2", opts.nid2));
    cap.count = static_cast<size_t>(kv.integer("count", static_cast<long>(count)));

    const auto vectors = bench::capture_dataset(cap);
    bench::DatasetHeader header;
    header.lmax = static_cast<uint32_t>(cap.frame.lmax);
    header.source = 0;
    header.snr_db = static_cast<float>(cap.scenario.snr_db);
    bench::dataset_write(out_path, header, vectors);
    write_resolved(kv, cap.frame, cap.scenario, opts, out_path + ".config");
    std::cout << "wrote " << vectors.size() << " labeled vectors to " << out_path << "\n";
    return 0;
}

int cmd_train(const std::string& dataset_path, const std::string& model_name,
              const std::string& out_path, bool normalize, uint64_t seed) {
    bench::DatasetHeader header;
    const auto vectors = bench::dataset_read(dataset_path, &header);
    std::vector<detect::DmrsFeatureVector> labeled;
    for (const auto& v : vectors)
        if (v.label) labeled.push_back(v);
    if (labeled.empty()) throw data_error("train: dataset has no labeled vectors");
    auto ds = learn::make_dataset(labeled, static_cast<int>(header.lmax));

    double np = 1.0;
    if (normalize) {
        np = ds.x.rowwise().squaredNorm().mean() / static_cast<double>(ds.x.cols());
        ds.x *= 1.0 / std::sqrt(np);
    }
    bench::ModelHypers hypers;
    hypers.mlp.seed = seed;
    hypers.forest.seed = seed;
    const auto tm = bench::train_model(model_name, ds, hypers, header.snr_db, normalize, np);
    learn::save_model(tm, out_path);
    std::cout << "trained " << model_name << " on " << ds.size() << " vectors ("
              << (normalize ? "normalized" : "raw") << ", N_p=" << np << ") -> " << out_path
              << "\n";
    return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& out_dir,
              std::vector<double> snr_points, std::vector<size_t> training_sizes,
              std::vector<std::string> models, size_t samples, bool no_normalize) {
    const auto kv = load_kv(opts);
    bench::SweepConfig cfg;
    cfg.frame = parse_frame(kv, opts.desk);
    cfg.scenario = parse_scenario(kv, opts);
    cfg.seed = opts.seed;
    cfg.normalize = !no_normalize && kv.flag("normalize", true);
    if (!snr_points.empty()) cfg.snr_points = snr_points;
    else cfg.snr_points = kv.num_list("snr_points", cfg.snr_points);
    if (!training_sizes.empty()) cfg.training_sizes = training_sizes;
    if (!models.empty()) cfg.models = models;
    cfg.samples_per_point =
        static_cast<size_t>(kv.integer("samples_per_point", static_cast<long>(samples)));
    cfg.hypers.mlp.seed = opts.seed;
    cfg.hypers.forest.seed = opts.seed;

    fs::create_directories(out_dir);
    const auto result =
        bench::run_sweep(cfg, [](const std::string& msg) { std::cerr << "[sweep] " << msg << "\n"; });

    std::ofstream(out_dir + "/sweep.csv") << bench::sweep_csv(result);
    std::ofstream(out_dir + "/summary.txt") << bench::sweep_summary(result);
    write_resolved(kv, cfg.frame, cfg.scenario, opts, out_dir + "/resolved.config");
    std::cout << bench::sweep_summary(result);
    return 0;
}

int cmd_selector_sim(const CommonOpts& opts, const std::string& model_path,
                     const std::string& out_path, size_t steps, int beam) {
    const auto kv = load_kv(opts);
    bench::SelectorSimConfig cfg;
    cfg.frame = parse_frame(kv, opts.desk);
    cfg.scenario = parse_scenario(kv, opts);
    cfg.nid1 = static_cast<int>(kv.integer("nid1", opts.nid1));
    cfg.nid2 = static_cast<int>(kv.integer("nid2", opts.nid2));
    cfg.n_steps = static_cast<size_t>(kv.integer("steps", static_cast<long>(steps)));
    cfg.fixed_beam = beam;
    cfg.seed = opts.seed;
    cfg.window = static_cast<size_t>(kv.integer("selector_window", 100));
    cfg.threshold = kv.num("selector_threshold", 0.95);
    cfg.hysteresis = kv.num("selector_hysteresis", 0.05);

    std::optional<learn::TrainedModel> model;
    if (!model_path.empty()) model = learn::load_model(model_path);
    const auto result = bench::run_selector_sim(cfg, model ? &*model : nullptr);

    std::ofstream(out_path) << bench::selector_csv(result);
    write_resolved(kv, cfg.frame, cfg.scenario, opts, out_path + ".config");
    if (result.switch_step)
        std::cout << "switched to learner at step " << *result.switch_step << "\n";
    else
        std::cout << "selector stayed on correlation for all " << cfg.n_steps << " steps\n";
    return 0;
}

int cmd_ingest(const CommonOpts& opts, const std::string& iq_path, const std::string& out_path,
               double sample_rate_override) {
    const auto kv = load_kv(opts);
    bench::KvConfig overrides;
    if (sample_rate_override > 0.0)
        overrides.set("sample_rate", std::to_string(sample_rate_override));
    const auto buf = bench::ingest_iq(iq_path, overrides);

    phy::FrameConfig frame = parse_frame(kv, opts.desk);
    if (frame.sample_rate != buf.sample_rate) {
        // the file's rate wins; fft size must follow
        frame.sample_rate = buf.sample_rate;
        frame.fft_size = static_cast<int>(buf.sample_rate / frame.scs);
        frame.validate();
    }
    bench::IqCaptureStats stats;
    const auto vectors = bench::capture_from_iq(buf, frame, &stats);
    if (stats.detections > 0 && stats.crc_labeled * 2 < stats.detections)
        std::cerr << "warning: CRC-verified labels below 50% (" << stats.crc_labeled << "/"
                  << stats.detections << ")\n";

    bench::DatasetHeader header;
    header.lmax = static_cast<uint32_t>(frame.lmax);
    header.source = 1;
    header.snr_db = 0.0f;
    bench::dataset_write(out_path, header, vectors);
    std::cout << "ingested " << buf.samples.size() << " samples: " << stats.periods
              << " periods, " << stats.detections << " detections, " << stats.crc_labeled
              << " CRC-labeled -> " << out_path << "\n";
    return 0;
}

int cmd_report(const std::string& csv_path) {
    std::ifstream is(csv_path);
    if (!is) throw data_error("cannot open report input: " + csv_path);
    std::string line;
    if (!std::getline(is, line) || line.rfind("snr_db,model,", 0) != 0)
        throw data_error("not a sweep CSV: " + csv_path);
    std::cout << std::left;
    std::cout << "  snr_db    model      train    fail_prob   wilson 95% CI\n";
    while (std::getline(is, line)) {
        std::stringstream ss(line);
        std::string snr, model, train, trials, fails, fp, lo, hi;
        std::getline(ss, snr, ',');
        std::getline(ss, model, ',');
        std::getline(ss, train, ',');
        std::getline(ss, trials, ',');
        std::getline(ss, fails, ',');
        std::getline(ss, fp, ',');
        std::getline(ss, lo, ',');
        std::getline(ss, hi, ',');
        std::cout << "  " << std::setw(9) << snr << " " << std::setw(10) << model << " "
                  << std::setw(8) << train << " " << std::setw(11) << fp << " [" << lo << ", "
                  << hi << "]\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"5G NR SSB cell search and channel-learning beam index detection toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string out_path, dataset_path, model_name = "svc", model_path, iq_path, csv_path;
    std::string out_dir = "sweep_out";
    size_t count = 800, samples = 2000, steps = 400;
    int beam = -1;
    bool no_normalize = false;
    double sample_rate_override = 0.0;
    std::vector<double> snr_points;
    std::vector<size_t> training_sizes;
    std::vector<std::string> models;
    uint64_t train_seed = 1;

    auto* capture = app.add_subcommand("capture", "simulate and store a labeled DMRS dataset");
    add_common(capture, opts);
    capture->add_option("--out", out_path, "output dataset path")->required();
    capture->add_option("--count", count, "number of vectors");

    auto* train = app.add_subcommand("train", "train one model on a stored dataset");
    train->add_option("--dataset", dataset_path, "input dataset")->required();
    train->add_option("--model", model_name, "mlp | logreg | svc | forest");
    train->add_option("--out", out_path, "output model path")->required();
    train->add_flag("--no-normalize", no_normalize, "train on raw features");
    train->add_option("--seed", train_seed, "training seed");

    auto* sweep = app.add_subcommand("sweep", "SNR x model x training-size fail-rate sweep");
    add_common(sweep, opts);
    sweep->add_option("--out-dir", out_dir, "output directory");
    sweep->add_option("--snr-points", snr_points, "SNR points in dB");
    sweep->add_option("--training-sizes", training_sizes, "training set sizes");
    sweep->add_option("--models", models, "models: corr mlp logreg svc forest vote");
    sweep->add_option("--samples", samples, "captured vectors per SNR point");
    sweep->add_flag("--no-normalize", no_normalize, "skip mean-power feature normalization");

    auto* selector = app.add_subcommand("selector-sim", "stream SSBs through the detection selector");
    add_common(selector, opts);
    selector->add_option("--model", model_path, "trained model file (omit for untrained learner)");
    selector->add_option("--out", out_path, "output CSV path")->required();
    selector->add_option("--steps", steps, "number of SSB arrivals");
    selector->add_option("--beam", beam, "fixed true beam index (-1: random)");

    auto* ingest = app.add_subcommand("ingest", "run cell search over a recorded IQ file");
    add_common(ingest, opts);
    ingest->add_option("--iq", iq_path, "raw complex float32 LE IQ file")->required();
    ingest->add_option("--out", out_path, "output dataset path")->required();
    ingest->add_option("--sample-rate", sample_rate_override, "override the sidecar sample rate");

    auto* report = app.add_subcommand("report", "pretty-print a sweep CSV");
    report->add_option("--csv", csv_path, "sweep.csv path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (capture->parsed()) return cmd_capture(opts, out_path, count);
        if (train->parsed())
            return cmd_train(dataset_path, model_name, out_path, !no_normalize, train_seed);
        if (sweep->parsed())
            return cmd_sweep(opts, out_dir, snr_points, training_sizes, models, samples,
                             no_normalize);
        if (selector->parsed()) return cmd_selector_sim(opts, model_path, out_path, steps, beam);
        if (ingest->parsed()) return cmd_ingest(opts, iq_path, out_path, sample_rate_override);
        if (report->parsed()) return cmd_report(csv_path);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
