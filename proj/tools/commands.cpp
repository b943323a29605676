#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "png_export.hpp"
#include "polqpt/dataset_io.hpp"
#include "polqpt/forward_model.hpp"
#include "polqpt/parallel.hpp"
#include "polqpt/process_gen.hpp"
#include "polqpt/reconstruct.hpp"
#include "process_description.hpp"
#include "staging.hpp"

namespace polqpt::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::size_t kMaxCount = std::size_t{1} << 40;

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::size_t default_threads() {
    const char* env = std::getenv(kThreadsEnv);
    if (env == nullptr || *env == '\0') return 0;
    const std::string text(env);
    std::size_t used = 0;
    unsigned long value = 0;
    try {
        value = std::stoul(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.front() == '-') {
        throw UsageError(std::string(kThreadsEnv) + "='" + text + "' is not a non-negative integer");
    }
    return value;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string read_text(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_json(const fs::path& file, const json& j) { write_file_atomically(file, j.dump(2) + "\n"); }

// Stored stacks are float32; compare at that precision.
bool stack_matches_file(const MeasurementStack& expected, const MeasurementStack& stored) {
    if (expected.n_pixels != stored.n_pixels) return false;
    for (std::size_t p = 0; p < kMeasurementCount; ++p) {
        for (std::size_t k = 0; k < expected.pixel_count(); ++k) {
            if (static_cast<float>(expected.images[p][k]) != static_cast<float>(stored.images[p][k])) return false;
        }
    }
    return true;
}

void write_stack_pngs(const fs::path& dir, const MeasurementStack& stack) {
    for (std::size_t p = 0; p < kMeasurementCount; ++p) {
        write_heatmap_png(dir / ("I_" + std::string(kMeasurementNames[p]) + ".png"), stack.images[p], stack.n_pixels);
    }
}

void write_map_pngs(const fs::path& dir, const ProcessMap& map) {
    const std::size_t area = map.pixel_count();
    std::vector<double> theta(area), polar(area), azimuth(area);
    for (std::size_t k = 0; k < area; ++k) {
        const auto sph = spherical_from_axis(map[k].axis);
        theta[k] = map[k].theta;
        polar[k] = sph.polar;
        azimuth[k] = sph.azimuth;
    }
    write_heatmap_png(dir / "theta.png", theta, map.size(), 0.0, kPi);
    write_heatmap_png(dir / "polar.png", polar, map.size(), 0.0, kPi);
    write_heatmap_png(dir / "azimuth.png", azimuth, map.size(), 0.0, kTwoPi);
}

// ---- generate -------------------------------------------------------------

struct GenerateOptions {
    std::size_t count = 0;
    std::size_t n_pixels = 64;
    double sigma = kDefaultNoiseSigma;
    std::uint64_t seed = 0;
    std::string kind = "fourier";
    double plate_fraction = 6000.0 / 56000.0;
    bool plate_fraction_set = false;
    std::size_t batch = 64;
    std::string out;
    bool overwrite = false;
    std::size_t threads = 0;

    [[nodiscard]] json echo() const {
        return {{"count", count},   {"n", n_pixels},   {"sigma", sigma},
                {"seed", seed},     {"kind", kind},    {"plate_fraction", plate_fraction},
                {"batch", batch},   {"out", out},      {"threads", threads}};
    }
};

// Interleaves plate samples so that exactly floor(count * fraction) of the
// first `count` samples are plate processes.
bool is_plate_sample(std::size_t index, double fraction) {
    const auto before = static_cast<std::size_t>(std::floor(static_cast<double>(index) * fraction));
    const auto after = static_cast<std::size_t>(std::floor(static_cast<double>(index + 1) * fraction));
    return after > before;
}

SampleRecord generate_sample(const GenerateOptions& o, std::size_t index) {
    const std::uint64_t sample_seed = derive_seed(o.seed, index);
    const bool plate = o.kind == "plate" || (o.kind == "mixed" && is_plate_sample(index, o.plate_fraction));
    GeneratorConfig cfg;
    cfg.n_pixels = o.n_pixels;
    const ProcessMap map = plate ? single_plate_random(derive_seed(sample_seed, 0), o.n_pixels)
                                 : random_process(cfg, derive_seed(sample_seed, 0));
    MeasurementStack stack = measurement_stack(map);
    if (o.sigma > 0.0) stack = add_noise(stack, o.sigma, derive_seed(sample_seed, 1));
    return encode_sample(stack, map);
}

int cmd_generate(const GenerateOptions& o, std::ostream& out) {
    if (o.plate_fraction_set && o.kind != "mixed") throw UsageError("--plate-fraction requires --kind mixed");

    StagedDirectory staged(o.out, o.overwrite);
    DatasetManifest header;
    header.n_pixels = o.n_pixels;
    header.noise_sigma = o.sigma;
    header.root_seed = o.seed;
    header.generator_kind = o.kind;
    DatasetWriter writer(staged.path(), header);

    std::vector<SampleRecord> batch;
    SampleRecord last;
    for (std::size_t start = 0; start < o.count; start += o.batch) {
        const std::size_t size = std::min(o.batch, o.count - start);
        batch.assign(size, {});
        parallel_for(size, o.threads, [&](std::size_t k) { batch[k] = generate_sample(o, start + k); });
        for (const auto& record : batch) writer.append(record);
        last = batch.back();
    }
    const DatasetManifest manifest = writer.finish();
    write_json(staged.path() / "command.json",
               {{"schema_version", kReportSchemaVersion}, {"command", "generate"}, {"flags", o.echo()}});

    const DatasetReader check(staged.path());
    if (check.size() != o.count || check.record(o.count - 1) != last) {
        throw std::runtime_error("validation of the written dataset failed");
    }
    staged.commit();
    out << "wrote " << manifest.sample_count << " samples (" << o.kind << ", N=" << o.n_pixels << ") to " << o.out
        << "\n";
    return kExitOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateOptions {
    std::string process_file;
    std::string out;
    bool no_png = false;
    bool overwrite = false;
    std::size_t threads = 0;

    [[nodiscard]] json echo() const {
        return {{"process_file", process_file}, {"out", out}, {"no_png", no_png}, {"threads", threads}};
    }
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
    const ProcessDescription desc = [&] {
        try {
            return parse_process_description(read_text(o.process_file));
        } catch (const DescriptionError& e) {
            throw DescriptionError(o.process_file + ": " + e.what());
        }
    }();
    MeasurementStack stack = measurement_stack(desc.map, o.threads);
    if (desc.noise && desc.noise->sigma > 0.0) stack = add_noise(stack, desc.noise->sigma, desc.noise->seed);

    StagedDirectory staged(o.out, o.overwrite);
    DatasetManifest header;
    header.n_pixels = desc.map.size();
    header.noise_sigma = stack.sigma;
    header.root_seed = desc.source.value("seed", std::uint64_t{0});
    header.generator_kind = desc.generator_kind;
    const std::pair<MeasurementStack, ProcessMap> sample{stack, desc.map};
    write_dataset(std::span(&sample, 1), staged.path(), header);
    if (!o.no_png) write_stack_pngs(staged.path(), stack);
    write_json(staged.path() / "command.json", {{"schema_version", kReportSchemaVersion},
                                                {"command", "simulate"},
                                                {"flags", o.echo()},
                                                {"process", desc.source}});

    const DatasetReader check(staged.path());
    if (check.size() != 1 || !stack_matches_file(stack, check.stack(0))) {
        throw std::runtime_error("validation of the written stack failed");
    }
    staged.commit();
    out << "simulated " << desc.kind << " process (N=" << desc.map.size() << ") into " << o.out << "\n";
    return kExitOk;
}

// ---- reconstruct ----------------------------------------------------------

struct MethodOptions {
    std::string method = "mle";
    int starts = MLEConfig{}.n_starts;
    int max_iters = MLEConfig{}.max_iters;
    double tolerance = MLEConfig{}.tolerance;
    int population = GAConfig{}.population_size;
    int generations = GAConfig{}.generations;
    std::uint64_t seed = 0;
    bool stitch = false;
    std::size_t threads = 0;

    [[nodiscard]] MLEConfig mle() const {
        MLEConfig cfg;
        cfg.n_starts = starts;
        cfg.max_iters = max_iters;
        cfg.tolerance = tolerance;
        cfg.threads = threads;
        cfg.validate();
        return cfg;
    }
    [[nodiscard]] GAConfig ga() const {
        GAConfig cfg;
        cfg.population_size = population;
        cfg.generations = generations;
        cfg.rng_seed = seed;
        cfg.stitch = stitch;
        cfg.threads = threads;
        cfg.validate();
        return cfg;
    }
    [[nodiscard]] json echo() const {
        json j{{"method", method}, {"threads", threads}};
        if (method == "mle") {
            j["mle"] = {{"starts", starts}, {"max_iters", max_iters}, {"tolerance", tolerance}};
        } else {
            j["ga"] = {{"population", population}, {"generations", generations}, {"seed", seed}, {"stitch", stitch}};
        }
        return j;
    }

    [[nodiscard]] ProcessMap reconstruct(const MeasurementStack& stack, const std::string& which) const {
        if (which == "mle") return reconstruct_map_mle(stack, mle());
        if (which == "ga") return reconstruct_map_ga(stack, ga());
        throw UsageError("unknown method '" + which + "' (mle, ga)");
    }
};

void add_method_flags(CLI::App& cmd, MethodOptions& m) {
    cmd.add_option("--starts", m.starts, "MLE grid starts refined per pixel")->check(CLI::Range(1, 1 << 20));
    cmd.add_option("--max-iters", m.max_iters, "MLE refinement iterations per start")->check(CLI::NonNegativeNumber);
    cmd.add_option("--tolerance", m.tolerance, "MLE relative cost-decrease tolerance")->check(CLI::PositiveNumber);
    cmd.add_option("--population", m.population, "GA population size")->check(CLI::Range(2, 1 << 20));
    cmd.add_option("--generations", m.generations, "GA generations")->check(CLI::NonNegativeNumber);
    cmd.add_option("--seed", m.seed, "GA root seed");
    cmd.add_flag("--stitch", m.stitch, "run sign stitching on the GA output");
}

struct ReconstructOptions {
    std::string stack;
    std::string out;
    std::optional<std::size_t> index;
    std::string truth;
    bool png = false;
    bool overwrite = false;
    MethodOptions method;

    [[nodiscard]] json echo() const {
        json j = method.echo();
        j["stack"] = stack;
        j["out"] = out;
        j["index"] = index ? json(*index) : json();
        j["truth"] = truth.empty() ? json() : json(truth);
        j["png"] = png;
        return j;
    }
};

int cmd_reconstruct(const ReconstructOptions& o, std::ostream& out) {
    if (o.method.method != "mle" && o.method.method != "ga") {
        throw UsageError("unknown method '" + o.method.method + "' (mle, ga)");
    }
    const DatasetReader reader(o.stack);
    const std::size_t n = reader.manifest().n_pixels;
    std::vector<std::size_t> indices;
    if (o.index) {
        if (*o.index >= reader.size()) {
            throw UsageError("--index " + std::to_string(*o.index) + " out of range (" +
                             std::to_string(reader.size()) + " samples)");
        }
        indices.push_back(*o.index);
    } else {
        indices.resize(reader.size());
        std::iota(indices.begin(), indices.end(), std::size_t{0});
    }
    std::optional<DatasetReader> truth;
    if (!o.truth.empty()) {
        truth.emplace(o.truth);
        if (truth->manifest().n_pixels != n) throw std::runtime_error("--truth has a different grid size");
        if (truth->size() <= indices.back()) throw std::runtime_error("--truth has fewer samples than --stack");
    }

    StagedDirectory staged(o.out, o.overwrite);
    std::vector<ProcessMap> maps;
    json entries = json::array();
    double total_ms = 0.0;
    double sum_delta = 0.0, sum_map = 0.0, sum_pixel = 0.0;
    for (const std::size_t i : indices) {
        const MeasurementStack stack = reader.stack(i);
        const auto start = std::chrono::steady_clock::now();
        ProcessMap map = o.method.reconstruct(stack, o.method.method);
        const double ms = elapsed_ms(start);
        const double delta = polarimetric_infidelity(stack, measurement_stack(map, o.method.threads));
        json entry{{"index", i}, {"wall_time_ms", ms}, {"polarimetric_infidelity", delta}};
        total_ms += ms;
        sum_delta += delta;
        if (truth) {
            const ProcessMap reference = truth->map(i);
            const double mf = map_fidelity(reference, map);
            const double pf = pixel_fidelity(reference, map);
            entry["map_fidelity"] = mf;
            entry["pixel_fidelity"] = pf;
            sum_map += mf;
            sum_pixel += pf;
        }
        entries.push_back(std::move(entry));
        maps.push_back(std::move(map));
    }

    const fs::path predictions = staged.path() / "predictions.bin";
    write_predictions(predictions, maps);
    if (o.png) write_map_pngs(staged.path(), maps.front());

    const auto count = static_cast<double>(maps.size());
    json summary{{"count", maps.size()},
                 {"total_wall_time_ms", total_ms},
                 {"mean_polarimetric_infidelity", sum_delta / count}};
    if (truth) {
        summary["mean_map_fidelity"] = sum_map / count;
        summary["mean_pixel_fidelity"] = sum_pixel / count;
    }
    const json report{{"schema_version", kReportSchemaVersion},
                      {"command", "reconstruct"},
                      {"config", o.echo()},
                      {"n_pixels", n},
                      {"maps", entries},
                      {"summary", summary}};
    write_json(staged.path() / "report.json", report);

    if (read_predictions(predictions, n).size() != maps.size()) {
        throw std::runtime_error("validation of the written predictions failed");
    }
    staged.commit();
    out << "reconstructed " << maps.size() << " map(s) with " << o.method.method << " in " << std::fixed
        << std::setprecision(1) << total_ms << " ms";
    if (truth) out << ", mean map fidelity " << std::setprecision(6) << sum_map / count;
    out << "\n";
    return kExitOk;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateOptions {
    std::string dataset;
    std::string predictions;
    std::string out;
    std::size_t threads = 0;
};

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
    const DatasetReader reader(o.dataset);
    const std::size_t n = reader.manifest().n_pixels;
    const std::vector<ProcessMap> predicted = read_predictions(o.predictions, n);
    if (predicted.size() != reader.size()) {
        throw std::runtime_error(o.predictions + " holds " + std::to_string(predicted.size()) + " maps, dataset has " +
                                 std::to_string(reader.size()));
    }
    json entries = json::array();
    double sum_map = 0.0, sum_pixel = 0.0, sum_delta = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const ProcessMap truth = reader.map(i);
        const double mf = map_fidelity(truth, predicted[i]);
        const double pf = pixel_fidelity(truth, predicted[i]);
        const double delta = polarimetric_infidelity(reader.stack(i), measurement_stack(predicted[i], o.threads));
        entries.push_back({{"index", i}, {"map_fidelity", mf}, {"pixel_fidelity", pf}, {"polarimetric_infidelity", delta}});
        sum_map += mf;
        sum_pixel += pf;
        sum_delta += delta;
    }
    const auto count = static_cast<double>(predicted.size());
    const json summary{{"count", predicted.size()},
                       {"mean_map_infidelity", 1.0 - sum_map / count},
                       {"mean_pixel_infidelity", 1.0 - sum_pixel / count},
                       {"mean_polarimetric_infidelity", sum_delta / count}};
    const json report{{"schema_version", kReportSchemaVersion},
                      {"command", "evaluate"},
                      {"config", {{"dataset", o.dataset}, {"predictions", o.predictions}}},
                      {"n_pixels", n},
                      {"maps", entries},
                      {"summary", summary}};
    if (!o.out.empty()) write_json(o.out, report);
    out << summary.dump() << "\n";
    return kExitOk;
}

// ---- bench ----------------------------------------------------------------

struct BenchOptions {
    std::string dataset;
    std::string methods = "mle,ga";
    int repetitions = 1;
    std::size_t limit = 0;
    std::string out;
    MethodOptions method;
};

std::vector<std::string> split_methods(const std::string& text) {
    std::vector<std::string> methods;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        if (item != "mle" && item != "ga") throw UsageError("unknown method '" + item + "' (mle, ga)");
        methods.push_back(item);
    }
    if (methods.empty()) throw UsageError("--methods is empty");
    return methods;
}

int cmd_bench(const BenchOptions& o, std::ostream& out) {
    if (o.repetitions < 1) throw UsageError("--repetitions must be at least 1");
    const std::vector<std::string> methods = split_methods(o.methods);
    const DatasetReader reader(o.dataset);
    const std::size_t maps = o.limit == 0 ? reader.size() : std::min(o.limit, reader.size());
    if (maps == 0) throw std::runtime_error(o.dataset + " holds no samples");

    std::ostringstream csv;
    csv << "method,n,mean_ms,median_ms,mean_map_infidelity\n";
    for (const std::string& method : methods) {
        std::vector<double> times;
        double infidelity = 0.0;
        for (std::size_t i = 0; i < maps; ++i) {
            const MeasurementStack stack = reader.stack(i);
            const ProcessMap truth = reader.map(i);
            ProcessMap result;
            for (int r = 0; r < o.repetitions; ++r) {
                const auto start = std::chrono::steady_clock::now();
                result = o.method.reconstruct(stack, method);
                times.push_back(elapsed_ms(start));
            }
            infidelity += 1.0 - map_fidelity(truth, result);
        }
        const double mean = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
        std::sort(times.begin(), times.end());
        const std::size_t mid = times.size() / 2;
        const double median = times.size() % 2 == 1 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
        csv << method << ',' << reader.manifest().n_pixels << ',' << std::fixed << std::setprecision(3) << mean << ','
            << median << ',' << std::scientific << std::setprecision(6) << infidelity / static_cast<double>(maps)
            << std::defaultfloat << '\n';
    }
    if (o.out.empty()) {
        out << csv.str();
    } else {
        write_file_atomically(o.out, csv.str());
        out << "wrote " << o.out << "\n";
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Space-dependent SU(2) process tomography toolkit", "polqpt"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "polqpt 0.1.0");

    std::size_t threads = 0;
    try {
        threads = default_threads();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    GenerateOptions gen;
    gen.threads = threads;
    auto* generate = app.add_subcommand("generate", "write a synthetic training corpus");
    generate->add_option("--count", gen.count, "number of samples")->required()->check(CLI::Range(std::size_t{1}, kMaxCount));
    generate->add_option("--n", gen.n_pixels, "grid side length")->check(CLI::Range(2, 4096));
    generate->add_option("--sigma", gen.sigma, "Gaussian noise standard deviation")->check(CLI::NonNegativeNumber);
    generate->add_option("--seed", gen.seed, "root seed");
    generate->add_option("--kind", gen.kind, "process family")->check(CLI::IsMember({"fourier", "plate", "mixed"}));
    auto* fraction = generate->add_option("--plate-fraction", gen.plate_fraction, "plate share for --kind mixed")
                         ->check(CLI::Range(0.0, 1.0));
    generate->add_option("--batch", gen.batch, "samples generated in parallel per batch")->check(CLI::Range(std::size_t{1}, kMaxCount));
    generate->add_option("--out", gen.out, "output dataset directory")->required();
    generate->add_flag("--overwrite", gen.overwrite, "replace an existing output");
    generate->add_option("--threads", gen.threads, "worker threads (0 = all cores)");

    SimulateOptions sim;
    sim.threads = threads;
    auto* simulate = app.add_subcommand("simulate", "measurement stack of a described process");
    simulate->add_option("--process", sim.process_file, "process description (JSON)")->required();
    simulate->add_option("--out", sim.out, "output directory")->required();
    simulate->add_flag("--no-png", sim.no_png, "skip the PNG previews");
    simulate->add_flag("--overwrite", sim.overwrite, "replace an existing output");
    simulate->add_option("--threads", sim.threads, "worker threads (0 = all cores)");

    ReconstructOptions rec;
    rec.method.threads = threads;
    auto* reconstruct = app.add_subcommand("reconstruct", "recover process maps from measurement stacks");
    reconstruct->add_option("--stack", rec.stack, "dataset directory holding the stacks")->required();
    reconstruct->add_option("--method", rec.method.method, "mle or ga");
    reconstruct->add_option("--out", rec.out, "output directory")->required();
    reconstruct->add_option("--index", rec.index, "reconstruct only this sample");
    reconstruct->add_option("--truth", rec.truth, "dataset with reference maps");
    reconstruct->add_flag("--png", rec.png, "write theta/polar/azimuth previews of the first map");
    reconstruct->add_flag("--overwrite", rec.overwrite, "replace an existing output");
    reconstruct->add_option("--threads", rec.method.threads, "worker threads (0 = all cores)");
    add_method_flags(*reconstruct, rec.method);

    EvaluateOptions eval;
    eval.threads = threads;
    auto* evaluate = app.add_subcommand("evaluate", "score a prediction file against a dataset");
    evaluate->add_option("--dataset", eval.dataset, "dataset directory")->required();
    evaluate->add_option("--predictions", eval.predictions, "prediction file (target layout)")->required();
    evaluate->add_option("--out", eval.out, "report file (JSON)");
    evaluate->add_option("--threads", eval.threads, "worker threads (0 = all cores)");

    BenchOptions bench;
    bench.method.threads = threads;
    auto* benchmark = app.add_subcommand("bench", "time reconstruction methods on a dataset");
    benchmark->add_option("--dataset", bench.dataset, "dataset directory")->required();
    benchmark->add_option("--methods", bench.methods, "comma-separated list of mle, ga");
    benchmark->add_option("--repetitions", bench.repetitions, "timed runs per map")
        ->check(CLI::Range(1, std::numeric_limits<int>::max()));
    benchmark->add_option("--limit", bench.limit, "use only the first maps (0 = all)");
    benchmark->add_option("--out", bench.out, "CSV file (default stdout)");
    benchmark->add_option("--threads", bench.method.threads, "worker threads (0 = all cores)");
    add_method_flags(*benchmark, bench.method);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        gen.plate_fraction_set = fraction->count() > 0;
        if (generate->parsed()) return cmd_generate(gen, out);
        if (simulate->parsed()) return cmd_simulate(sim, out);
        if (reconstruct->parsed()) return cmd_reconstruct(rec, out);
        if (evaluate->parsed()) return cmd_evaluate(eval, out);
        if (benchmark->parsed()) return cmd_bench(bench, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace polqpt::cli
