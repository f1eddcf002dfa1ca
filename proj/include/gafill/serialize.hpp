#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gafill/data_matrix.hpp"

namespace gafill {

// Artifact files share one layout: "GFMB" magic, format version, a kind
// tag, the payload, and a trailing FNV-1a 64 checksum over everything
// before it. Readers reject unknown versions and checksum mismatches.

inline constexpr std::uint32_t kFormatVersion = 1;

enum class FileKind : std::uint32_t { Matrix = 1, Backend = 2 };

std::uint64_t fnv1a(const unsigned char* data, std::size_t len);

class BinaryWriter {
public:
    explicit BinaryWriter(FileKind kind);

    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);
    void str(const std::string& s);
    void matrix(const Eigen::MatrixXd& m); // dims then row-major payload
    void vec(const Eigen::VectorXd& v);

    void save(const std::string& path) const; // appends the checksum

private:
    std::vector<unsigned char> buf_;
};

class BinaryReader {
public:
    // Loads the whole file and verifies magic, version, and checksum.
    explicit BinaryReader(const std::string& path);

    const std::string& path() const { return path_; }

    FileKind kind() const { return kind_; }

    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    std::string str();
    Eigen::MatrixXd matrix();
    Eigen::VectorXd vec();

private:
    void need(std::size_t n) const;

    std::string path_;
    std::vector<unsigned char> buf_;
    std::size_t pos_ = 0;
    FileKind kind_;
};

/// Matrix artifacts carry the hash of the config that produced them so
/// later stages can detect stale mixes.
void save_matrix(const DataMatrix& data, const std::string& path,
                 const std::string& producing_hash);

struct LoadedMatrix {
    DataMatrix data;
    std::string producing_hash;
};

LoadedMatrix load_matrix(const std::string& path);

} // namespace gafill
