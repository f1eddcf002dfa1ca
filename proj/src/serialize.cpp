#include "gafill/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "gafill/errors.hpp"

namespace gafill {

namespace {

constexpr char kMagic[4] = {'G', 'F', 'M', 'B'};

static_assert(std::endian::native == std::endian::little,
              "artifact layout assumes little-endian doubles");

} // namespace

std::uint64_t fnv1a(const unsigned char* data, std::size_t len) {
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

BinaryWriter::BinaryWriter(FileKind kind) {
    buf_.insert(buf_.end(), kMagic, kMagic + 4);
    u32(kFormatVersion);
    u32(static_cast<std::uint32_t>(kind));
}

void BinaryWriter::u32(std::uint32_t v) {
    unsigned char b[4];
    std::memcpy(b, &v, 4);
    buf_.insert(buf_.end(), b, b + 4);
}

void BinaryWriter::u64(std::uint64_t v) {
    unsigned char b[8];
    std::memcpy(b, &v, 8);
    buf_.insert(buf_.end(), b, b + 8);
}

void BinaryWriter::f64(double v) {
    unsigned char b[8];
    std::memcpy(b, &v, 8);
    buf_.insert(buf_.end(), b, b + 8);
}

void BinaryWriter::str(const std::string& s) {
    u64(s.size());
    buf_.insert(buf_.end(), s.begin(), s.end());
}

void BinaryWriter::matrix(const Eigen::MatrixXd& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) f64(m(i, j));
}

void BinaryWriter::vec(const Eigen::VectorXd& v) {
    u64(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v(i));
}

void BinaryWriter::save(const std::string& path) const {
    std::uint64_t checksum = fnv1a(buf_.data(), buf_.size());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw DataError("cannot write artifact: " + path);
    out.write(reinterpret_cast<const char*>(buf_.data()),
              static_cast<std::streamsize>(buf_.size()));
    out.write(reinterpret_cast<const char*>(&checksum), 8);
    if (!out)
        throw DataError("failed while writing artifact: " + path);
}

BinaryReader::BinaryReader(const std::string& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open artifact: " + path);
    buf_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    if (buf_.size() < 4 + 4 + 4 + 8)
        throw DataError("artifact " + path + " is truncated");

    std::uint64_t stored;
    std::memcpy(&stored, buf_.data() + buf_.size() - 8, 8);
    std::uint64_t actual = fnv1a(buf_.data(), buf_.size() - 8);
    if (stored != actual)
        throw DataError("artifact " + path + " failed its checksum; the file is corrupt");
    buf_.resize(buf_.size() - 8);

    if (std::memcmp(buf_.data(), kMagic, 4) != 0)
        throw DataError("artifact " + path + " has the wrong magic bytes");
    pos_ = 4;
    std::uint32_t version = u32();
    if (version != kFormatVersion)
        throw DataError("artifact " + path + " has format version " +
                        std::to_string(version) + ", expected " +
                        std::to_string(kFormatVersion));
    kind_ = static_cast<FileKind>(u32());
}

void BinaryReader::need(std::size_t n) const {
    if (pos_ + n > buf_.size())
        throw DataError("artifact " + path_ + " ended unexpectedly");
}

std::uint32_t BinaryReader::u32() {
    need(4);
    std::uint32_t v;
    std::memcpy(&v, buf_.data() + pos_, 4);
    pos_ += 4;
    return v;
}

std::uint64_t BinaryReader::u64() {
    need(8);
    std::uint64_t v;
    std::memcpy(&v, buf_.data() + pos_, 8);
    pos_ += 8;
    return v;
}

double BinaryReader::f64() {
    need(8);
    double v;
    std::memcpy(&v, buf_.data() + pos_, 8);
    pos_ += 8;
    return v;
}

std::string BinaryReader::str() {
    std::uint64_t n = u64();
    need(n);
    std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
    pos_ += n;
    return s;
}

Eigen::MatrixXd BinaryReader::matrix() {
    std::uint64_t rows = u64();
    std::uint64_t cols = u64();
    Eigen::MatrixXd m(rows, cols);
    for (std::uint64_t i = 0; i < rows; ++i)
        for (std::uint64_t j = 0; j < cols; ++j) m(i, j) = f64();
    return m;
}

Eigen::VectorXd BinaryReader::vec() {
    std::uint64_t n = u64();
    Eigen::VectorXd v(n);
    for (std::uint64_t i = 0; i < n; ++i) v(i) = f64();
    return v;
}

void save_matrix(const DataMatrix& data, const std::string& path,
                 const std::string& producing_hash) {
    BinaryWriter w(FileKind::Matrix);
    w.str(producing_hash);
    w.u32(data.space == Space::Normalized ? 1 : 0);
    w.matrix(data.values);
    w.u64(static_cast<std::uint64_t>(data.mask.rows()));
    w.u64(static_cast<std::uint64_t>(data.mask.cols()));
    for (Eigen::Index i = 0; i < data.mask.rows(); ++i)
        for (Eigen::Index j = 0; j < data.mask.cols(); ++j)
            w.u32(data.mask(i, j) ? 1 : 0);
    w.save(path);
}

LoadedMatrix load_matrix(const std::string& path) {
    BinaryReader r(path);
    if (r.kind() != FileKind::Matrix)
        throw DataError("artifact " + path + " is not a matrix file");
    LoadedMatrix out;
    out.producing_hash = r.str();
    out.data.space = r.u32() == 1 ? Space::Normalized : Space::Raw;
    out.data.values = r.matrix();
    std::uint64_t rows = r.u64();
    std::uint64_t cols = r.u64();
    if (rows != static_cast<std::uint64_t>(out.data.values.rows()) ||
        cols != static_cast<std::uint64_t>(out.data.values.cols()))
        throw DataError("artifact " + path + " has inconsistent mask dimensions");
    out.data.mask.resize(rows, cols);
    for (std::uint64_t i = 0; i < rows; ++i)
        for (std::uint64_t j = 0; j < cols; ++j)
            out.data.mask(i, j) = r.u32() == 1;
    return out;
}

} // namespace gafill
