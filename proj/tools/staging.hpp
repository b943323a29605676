#pragma once

#include <filesystem>
#include <string>

namespace polqpt::cli {

/// Output directory built under a hidden sibling name and renamed into place
/// by commit(). An uncommitted staging directory is removed on destruction.
class StagedDirectory {
  public:
    /// Throws std::runtime_error if `target` exists and `overwrite` is false.
    StagedDirectory(std::filesystem::path target, bool overwrite);
    ~StagedDirectory();
    StagedDirectory(const StagedDirectory&) = delete;
    StagedDirectory& operator=(const StagedDirectory&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const noexcept { return staging_; }
    void commit();

  private:
    std::filesystem::path target_;
    std::filesystem::path staging_;
    bool committed_ = false;
};

/// Writes `contents` to a temporary sibling and renames it over `file`.
void write_file_atomically(const std::filesystem::path& file, const std::string& contents);

}  // namespace polqpt::cli
