#include "staging.hpp"

#include <fstream>
#include <stdexcept>
#include <system_error>

namespace polqpt::cli {

namespace fs = std::filesystem;

namespace {

fs::path sibling(const fs::path& target, const char* suffix) {
    fs::path absolute = fs::absolute(target).lexically_normal();
    if (absolute.filename().empty()) absolute = absolute.parent_path();
    return absolute.parent_path() / ("." + absolute.filename().string() + suffix);
}

}  // namespace

StagedDirectory::StagedDirectory(fs::path target, bool overwrite)
    : target_(std::move(target)), staging_(sibling(target_, ".partial")) {
    if (fs::exists(target_) && !overwrite) {
        throw std::runtime_error(target_.string() + " already exists (pass --overwrite to replace it)");
    }
    std::error_code ec;
    fs::remove_all(staging_, ec);
    fs::create_directories(staging_, ec);
    if (ec) throw std::runtime_error("cannot create " + staging_.string() + ": " + ec.message());
}

StagedDirectory::~StagedDirectory() {
    if (committed_) return;
    std::error_code ec;
    fs::remove_all(staging_, ec);
}

void StagedDirectory::commit() {
    std::error_code ec;
    fs::remove_all(target_, ec);
    if (ec) throw std::runtime_error("cannot replace " + target_.string() + ": " + ec.message());
    fs::rename(staging_, target_, ec);
    if (ec) throw std::runtime_error("cannot move output into " + target_.string() + ": " + ec.message());
    committed_ = true;
}

void write_file_atomically(const fs::path& file, const std::string& contents) {
    const fs::path tmp = sibling(file, ".partial");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << contents;
        if (!out.flush()) {
            out.close();
            fs::remove(tmp);
            throw std::runtime_error("write failed for " + file.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, file, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot write " + file.string() + ": " + ec.message());
    }
}

}  // namespace polqpt::cli
