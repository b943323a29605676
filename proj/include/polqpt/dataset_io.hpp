#pragma once

/// @file dataset_io.hpp
/// On-disk corpus of (measurement stack, process map) pairs, format version 1.
///
/// A dataset is a directory holding
///   manifest.json  UTF-8 JSON header (DatasetManifest)
///   inputs.bin     sample_count x 5 x N x N float32, little-endian
///                  (images I_LL, I_LH, I_LD, I_HH, I_HD)
///   targets.bin    sample_count x 3 x N x N float32, little-endian
///                  (theta, polar, azimuth)
/// Arrays are row-major inside each channel and sample-major overall.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polqpt/forward_model.hpp"
#include "polqpt/process_map.hpp"

namespace polqpt {

inline constexpr int kFormatVersion = 1;
inline constexpr int kInputChannels = 5;
inline constexpr int kTargetChannels = 3;

class CorruptDatasetError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct DatasetManifest {
    int format_version = kFormatVersion;
    std::size_t n_pixels = 64;
    std::size_t sample_count = 0;
    int channels_in = kInputChannels;
    int channels_out = kTargetChannels;
    std::string dtype = "float32";
    std::string byte_order = "little";
    std::string layout = "row-major,sample-major";
    double noise_sigma = kDefaultNoiseSigma;
    std::uint64_t root_seed = 0;
    std::string generator_kind = "fourier";  ///< fourier | plate | mixed

    /// Throws CorruptDatasetError naming the offending field.
    void validate() const;

    [[nodiscard]] std::string to_json() const;
    static DatasetManifest from_json(const std::string& text);

    [[nodiscard]] std::uint64_t input_bytes() const noexcept;
    [[nodiscard]] std::uint64_t target_bytes() const noexcept;
};

/// One sample exactly as stored.
struct SampleRecord {
    std::vector<float> inputs;   ///< 5 N^2
    std::vector<float> targets;  ///< 3 N^2

    friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

[[nodiscard]] SampleRecord encode_sample(const MeasurementStack& stack, const ProcessMap& map);
[[nodiscard]] MeasurementStack decode_stack(const SampleRecord& record, std::size_t n_pixels);
/// Theta is clamped into [0, pi] since float32 rounding can push pi past the double value.
[[nodiscard]] ProcessMap decode_map(const SampleRecord& record, std::size_t n_pixels);

/// Streams samples to disk. Files are written under temporary names and only
/// renamed into place by finish(), so an aborted writer leaves no dataset.
class DatasetWriter {
  public:
    /// `header` supplies everything except sample_count.
    DatasetWriter(std::filesystem::path dir, DatasetManifest header);
    ~DatasetWriter();
    DatasetWriter(const DatasetWriter&) = delete;
    DatasetWriter& operator=(const DatasetWriter&) = delete;

    void append(const SampleRecord& record);
    void append(const MeasurementStack& stack, const ProcessMap& map);
    DatasetManifest finish();

  private:
    std::filesystem::path dir_;
    DatasetManifest manifest_;
    std::ofstream inputs_;
    std::ofstream targets_;
    bool finished_ = false;
};

/// Writes a whole corpus. Throws std::invalid_argument for an empty sequence or
/// mixed grid sizes, std::runtime_error on I/O failure.
DatasetManifest write_dataset(std::span<const std::pair<MeasurementStack, ProcessMap>> samples,
                              const std::filesystem::path& dir, DatasetManifest header);

/// Random access to a dataset without loading it. Safe for concurrent reads.
class DatasetReader {
  public:
    explicit DatasetReader(std::filesystem::path dir);

    [[nodiscard]] const DatasetManifest& manifest() const noexcept { return manifest_; }
    [[nodiscard]] std::size_t size() const noexcept { return manifest_.sample_count; }

    [[nodiscard]] SampleRecord record(std::size_t index) const;
    [[nodiscard]] MeasurementStack stack(std::size_t index) const;
    [[nodiscard]] ProcessMap map(std::size_t index) const;

  private:
    std::filesystem::path dir_;
    DatasetManifest manifest_;
};

[[nodiscard]] DatasetReader read_dataset(const std::filesystem::path& dir);

/// Prediction files carry only target arrays, laid out exactly like targets.bin
/// (count x 3 x N x N float32, little-endian); N comes from the paired dataset.
void write_predictions(const std::filesystem::path& file, std::span<const ProcessMap> maps);
/// Throws CorruptDatasetError when the file size is not a whole number of maps.
[[nodiscard]] std::vector<ProcessMap> read_predictions(const std::filesystem::path& file, std::size_t n_pixels);

}  // namespace polqpt
