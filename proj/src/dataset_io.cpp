#include "polqpt/dataset_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace polqpt {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kInputsName = "inputs.bin";
constexpr const char* kTargetsName = "targets.bin";
constexpr const char* kPartialSuffix = ".partial";

void write_floats(std::ofstream& out, std::span<const float> values) {
    std::vector<unsigned char> bytes(values.size() * 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(values[i]);
        for (int b = 0; b < 4; ++b) bytes[4 * i + b] = static_cast<unsigned char>(bits >> (8 * b));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<float> read_floats(const fs::path& file, std::uint64_t offset, std::size_t count) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    in.seekg(static_cast<std::streamoff>(offset));
    std::vector<unsigned char> bytes(count * 4);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
        throw CorruptDatasetError("short read from " + file.string());
    }
    std::vector<float> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[4 * i + b]) << (8 * b);
        out[i] = std::bit_cast<float>(bits);
    }
    return out;
}

template <typename T>
T required(const json& j, const char* key) {
    if (!j.contains(key)) throw CorruptDatasetError(std::string("manifest: missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw CorruptDatasetError(std::string("manifest: field '") + key + "' has the wrong type");
    }
}

}  // namespace

void DatasetManifest::validate() const {
    if (format_version != kFormatVersion) {
        throw CorruptDatasetError("manifest: unsupported format_version " + std::to_string(format_version));
    }
    if (n_pixels == 0) throw CorruptDatasetError("manifest: n_pixels must be positive");
    if (channels_in != kInputChannels) {
        throw CorruptDatasetError("manifest: channels_in must be 5, got " + std::to_string(channels_in));
    }
    if (channels_out != kTargetChannels) {
        throw CorruptDatasetError("manifest: channels_out must be 3, got " + std::to_string(channels_out));
    }
    if (dtype != "float32") throw CorruptDatasetError("manifest: unsupported dtype '" + dtype + "'");
    if (byte_order != "little") throw CorruptDatasetError("manifest: unsupported byte_order '" + byte_order + "'");
    if (layout != "row-major,sample-major") throw CorruptDatasetError("manifest: unsupported layout '" + layout + "'");
    if (generator_kind != "fourier" && generator_kind != "plate" && generator_kind != "mixed") {
        throw CorruptDatasetError("manifest: unknown generator_kind '" + generator_kind + "'");
    }
    if (!(noise_sigma >= 0.0)) throw CorruptDatasetError("manifest: noise_sigma must be non-negative");
}

std::string DatasetManifest::to_json() const {
    json j;
    j["format_version"] = format_version;
    j["n_pixels"] = n_pixels;
    j["sample_count"] = sample_count;
    j["channels_in"] = channels_in;
    j["channels_out"] = channels_out;
    j["input_channels"] = {"I_LL", "I_LH", "I_LD", "I_HH", "I_HD"};
    j["target_channels"] = {"theta", "polar", "azimuth"};
    j["dtype"] = dtype;
    j["byte_order"] = byte_order;
    j["layout"] = layout;
    j["noise_sigma"] = noise_sigma;
    j["root_seed"] = root_seed;
    j["generator_kind"] = generator_kind;
    return j.dump(2) + "\n";
}

DatasetManifest DatasetManifest::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw CorruptDatasetError(std::string("manifest: ") + e.what());
    }
    DatasetManifest m;
    m.format_version = required<int>(j, "format_version");
    if (m.format_version != kFormatVersion) {
        throw CorruptDatasetError("manifest: unsupported format_version " + std::to_string(m.format_version));
    }
    m.n_pixels = required<std::size_t>(j, "n_pixels");
    m.sample_count = required<std::size_t>(j, "sample_count");
    m.channels_in = required<int>(j, "channels_in");
    m.channels_out = required<int>(j, "channels_out");
    m.dtype = required<std::string>(j, "dtype");
    m.byte_order = required<std::string>(j, "byte_order");
    m.layout = required<std::string>(j, "layout");
    m.noise_sigma = required<double>(j, "noise_sigma");
    m.root_seed = required<std::uint64_t>(j, "root_seed");
    m.generator_kind = required<std::string>(j, "generator_kind");
    m.validate();
    return m;
}

std::uint64_t DatasetManifest::input_bytes() const noexcept {
    return static_cast<std::uint64_t>(sample_count) * kInputChannels * n_pixels * n_pixels * 4;
}

std::uint64_t DatasetManifest::target_bytes() const noexcept {
    return static_cast<std::uint64_t>(sample_count) * kTargetChannels * n_pixels * n_pixels * 4;
}

SampleRecord encode_sample(const MeasurementStack& stack, const ProcessMap& map) {
    if (stack.n_pixels != map.size()) {
        throw std::invalid_argument("encode_sample: stack is " + std::to_string(stack.n_pixels) + " pixels wide, map " +
                                    std::to_string(map.size()));
    }
    const std::size_t area = map.pixel_count();
    SampleRecord r;
    r.inputs.resize(kInputChannels * area);
    r.targets.resize(kTargetChannels * area);
    for (std::size_t p = 0; p < kMeasurementCount; ++p) {
        std::transform(stack.images[p].begin(), stack.images[p].end(), r.inputs.begin() + p * area,
                       [](double v) { return static_cast<float>(v); });
    }
    for (std::size_t k = 0; k < area; ++k) {
        const auto sph = spherical_from_axis(map[k].axis);
        r.targets[k] = static_cast<float>(map[k].theta);
        r.targets[area + k] = static_cast<float>(sph.polar);
        r.targets[2 * area + k] = static_cast<float>(sph.azimuth);
    }
    return r;
}

MeasurementStack decode_stack(const SampleRecord& record, std::size_t n_pixels) {
    const std::size_t area = n_pixels * n_pixels;
    if (record.inputs.size() != kInputChannels * area) throw std::invalid_argument("decode_stack: wrong input size");
    MeasurementStack s(n_pixels);
    for (std::size_t p = 0; p < kMeasurementCount; ++p) {
        std::copy(record.inputs.begin() + p * area, record.inputs.begin() + (p + 1) * area, s.images[p].begin());
    }
    return s;
}

ProcessMap decode_map(const SampleRecord& record, std::size_t n_pixels) {
    const std::size_t area = n_pixels * n_pixels;
    if (record.targets.size() != kTargetChannels * area) throw std::invalid_argument("decode_map: wrong target size");
    std::vector<AxisAngle> params(area);
    for (std::size_t k = 0; k < area; ++k) {
        const double theta = record.targets[k];
        const double polar = record.targets[area + k];
        const double azimuth = record.targets[2 * area + k];
        if (!std::isfinite(theta) || !std::isfinite(polar) || !std::isfinite(azimuth)) {
            throw CorruptDatasetError("decode_map: non-finite target at pixel " + std::to_string(k));
        }
        params[k] = {std::clamp(theta, 0.0, kPi), axis_from_spherical({polar, azimuth})};
    }
    return ProcessMap(n_pixels, std::move(params));
}

DatasetWriter::DatasetWriter(fs::path dir, DatasetManifest header) : dir_(std::move(dir)), manifest_(std::move(header)) {
    manifest_.sample_count = 0;
    manifest_.validate();
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw std::runtime_error("cannot create " + dir_.string() + ": " + ec.message());
    inputs_.open(dir_ / (std::string(kInputsName) + kPartialSuffix), std::ios::binary | std::ios::trunc);
    targets_.open(dir_ / (std::string(kTargetsName) + kPartialSuffix), std::ios::binary | std::ios::trunc);
    if (!inputs_ || !targets_) throw std::runtime_error("cannot open dataset files in " + dir_.string());
}

DatasetWriter::~DatasetWriter() {
    if (finished_) return;
    inputs_.close();
    targets_.close();
    std::error_code ec;
    fs::remove(dir_ / (std::string(kInputsName) + kPartialSuffix), ec);
    fs::remove(dir_ / (std::string(kTargetsName) + kPartialSuffix), ec);
}

void DatasetWriter::append(const SampleRecord& record) {
    if (finished_) throw std::logic_error("DatasetWriter: append after finish");
    const std::size_t area = manifest_.n_pixels * manifest_.n_pixels;
    if (record.inputs.size() != kInputChannels * area || record.targets.size() != kTargetChannels * area) {
        throw std::invalid_argument("DatasetWriter: sample does not match n_pixels = " +
                                    std::to_string(manifest_.n_pixels));
    }
    write_floats(inputs_, record.inputs);
    write_floats(targets_, record.targets);
    if (!inputs_ || !targets_) throw std::runtime_error("write failed in " + dir_.string());
    ++manifest_.sample_count;
}

void DatasetWriter::append(const MeasurementStack& stack, const ProcessMap& map) {
    if (stack.n_pixels != manifest_.n_pixels || map.size() != manifest_.n_pixels) {
        throw std::invalid_argument("DatasetWriter: sample does not match n_pixels = " +
                                    std::to_string(manifest_.n_pixels));
    }
    append(encode_sample(stack, map));
}

DatasetManifest DatasetWriter::finish() {
    if (finished_) return manifest_;
    inputs_.close();
    targets_.close();
    if (!inputs_ || !targets_) throw std::runtime_error("flush failed in " + dir_.string());
    const fs::path manifest_tmp = dir_ / (std::string(kManifestName) + kPartialSuffix);
    {
        std::ofstream out(manifest_tmp, std::ios::binary | std::ios::trunc);
        out << manifest_.to_json();
        if (!out) throw std::runtime_error("cannot write " + manifest_tmp.string());
    }
    fs::rename(dir_ / (std::string(kInputsName) + kPartialSuffix), dir_ / kInputsName);
    fs::rename(dir_ / (std::string(kTargetsName) + kPartialSuffix), dir_ / kTargetsName);
    fs::rename(manifest_tmp, dir_ / kManifestName);
    finished_ = true;
    return manifest_;
}

DatasetManifest write_dataset(std::span<const std::pair<MeasurementStack, ProcessMap>> samples,
                              const fs::path& dir, DatasetManifest header) {
    if (samples.empty()) throw std::invalid_argument("write_dataset: no samples");
    const std::size_t n = samples.front().first.n_pixels;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].first.n_pixels != n || samples[i].second.size() != n) {
            throw std::invalid_argument("write_dataset: sample " + std::to_string(i) + " is not " +
                                        std::to_string(n) + " pixels wide");
        }
    }
    header.n_pixels = n;
    DatasetWriter writer(dir, std::move(header));
    for (const auto& [stack, map] : samples) writer.append(stack, map);
    return writer.finish();
}

DatasetReader::DatasetReader(fs::path dir) : dir_(std::move(dir)) {
    std::ifstream in(dir_ / kManifestName, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + (dir_ / kManifestName).string());
    std::stringstream buf;
    buf << in.rdbuf();
    manifest_ = DatasetManifest::from_json(buf.str());

    auto check = [&](const char* name, std::uint64_t expected) {
        std::error_code ec;
        const auto actual = fs::file_size(dir_ / name, ec);
        if (ec) throw CorruptDatasetError(std::string("missing ") + name + " in " + dir_.string());
        if (actual != expected) {
            throw CorruptDatasetError(std::string(name) + ": expected " + std::to_string(expected) + " bytes, found " +
                                      std::to_string(actual));
        }
    };
    check(kInputsName, manifest_.input_bytes());
    check(kTargetsName, manifest_.target_bytes());
}

SampleRecord DatasetReader::record(std::size_t index) const {
    if (index >= manifest_.sample_count) {
        throw std::out_of_range("sample " + std::to_string(index) + " out of range (count " +
                                std::to_string(manifest_.sample_count) + ")");
    }
    const std::size_t area = manifest_.n_pixels * manifest_.n_pixels;
    SampleRecord r;
    r.inputs = read_floats(dir_ / kInputsName, static_cast<std::uint64_t>(index) * kInputChannels * area * 4,
                           kInputChannels * area);
    r.targets = read_floats(dir_ / kTargetsName, static_cast<std::uint64_t>(index) * kTargetChannels * area * 4,
                            kTargetChannels * area);
    return r;
}

MeasurementStack DatasetReader::stack(std::size_t index) const {
    MeasurementStack s = decode_stack(record(index), manifest_.n_pixels);
    s.noisy = manifest_.noise_sigma > 0.0;
    s.sigma = manifest_.noise_sigma;
    return s;
}

ProcessMap DatasetReader::map(std::size_t index) const { return decode_map(record(index), manifest_.n_pixels); }

DatasetReader read_dataset(const fs::path& dir) { return DatasetReader(dir); }

void write_predictions(const fs::path& file, std::span<const ProcessMap> maps) {
    if (maps.empty()) throw std::invalid_argument("write_predictions: no maps");
    const std::size_t n = maps.front().size();
    const fs::path tmp = file.string() + kPartialSuffix;
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        for (std::size_t i = 0; i < maps.size(); ++i) {
            if (maps[i].size() != n) {
                out.close();
                fs::remove(tmp);
                throw std::invalid_argument("write_predictions: map " + std::to_string(i) + " is not " +
                                            std::to_string(n) + " pixels wide");
            }
            write_floats(out, encode_sample(MeasurementStack(n), maps[i]).targets);
        }
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, file);
}

std::vector<ProcessMap> read_predictions(const fs::path& file, std::size_t n_pixels) {
    if (n_pixels == 0) throw std::invalid_argument("read_predictions: n_pixels must be positive");
    std::error_code ec;
    const auto bytes = fs::file_size(file, ec);
    if (ec) throw std::runtime_error("cannot open " + file.string());
    const std::uint64_t per_map = static_cast<std::uint64_t>(kTargetChannels) * n_pixels * n_pixels * 4;
    if (bytes == 0 || bytes % per_map != 0) {
        throw CorruptDatasetError(file.string() + ": " + std::to_string(bytes) + " bytes is not a multiple of " +
                                  std::to_string(per_map) + " (one " + std::to_string(n_pixels) + "x" +
                                  std::to_string(n_pixels) + " map)");
    }
    const std::size_t count = bytes / per_map;
    const std::size_t floats = kTargetChannels * n_pixels * n_pixels;
    std::vector<ProcessMap> maps;
    maps.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        SampleRecord r;
        r.targets = read_floats(file, i * per_map, floats);
        maps.push_back(decode_map(r, n_pixels));
    }
    return maps;
}

}  // namespace polqpt
