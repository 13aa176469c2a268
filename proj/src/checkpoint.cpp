/**
 * @file src/checkpoint.cpp
 * @copyright Apache License 2.0
 */
#include "lfres/checkpoint.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <limits>

#include "lfres/bigprod.hpp"
#include "lfres/parallel.hpp"

namespace lfres {

namespace {

constexpr char kMagic[4] = {'L', 'F', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw CheckpointError("checkpoint: truncated file");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8))
    throw CheckpointError("checkpoint: truncated file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

void put_mpz(std::ostream& out, const mpz_class& z) {
  if (mpz_sgn(z.get_mpz_t()) == 0) {
    put_u64(out, 0);
    return;
  }
  const std::size_t bytes = (mpz_sizeinbase(z.get_mpz_t(), 2) + 7) / 8;
  std::vector<unsigned char> buf(bytes);
  std::size_t written = 0;
  mpz_export(buf.data(), &written, 1, 1, 1, 0, z.get_mpz_t());
  put_u64(out, written);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(written));
}

mpz_class get_mpz(std::istream& in, std::uint64_t remaining_limit) {
  const std::uint64_t len = get_u64(in);
  if (len > remaining_limit) throw CheckpointError("checkpoint: magnitude length exceeds file size");
  mpz_class z = 0;
  if (len == 0) return z;
  std::vector<unsigned char> buf(len);
  if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(len)))
    throw CheckpointError("checkpoint: truncated magnitude");
  mpz_import(z.get_mpz_t(), len, 1, 1, 1, 0, buf.data());
  return z;
}

}  // namespace

void Checkpoint::validate() const {
  if (blocks.empty()) {
    if (m != 0) throw CheckpointError("checkpoint: empty frontier but m != 0");
    return;
  }
  if (blocks.front().k_start != 1)
    throw CheckpointError("checkpoint: frontier does not start at 1");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].k_end < blocks[i].k_start)
      throw CheckpointError("checkpoint: inverted block range");
    if (i && blocks[i].k_start != blocks[i - 1].k_end + 1)
      throw CheckpointError("checkpoint: frontier not contiguous");
  }
  if (blocks.back().k_end != m)
    throw CheckpointError("checkpoint: frontier does not cover [1, m]");
}

void Checkpoint::extend_to(std::uint64_t new_m, int threads) {
  if (new_m < m) throw CheckpointError("checkpoint: cannot extend backwards");
  validate();
  while (m < new_m) {
    // Largest power-of-two block that keeps the counter aligned and fits.
    const int align = (m == 0) ? 63 : std::countr_zero(m);
    const int fit = 63 - std::countl_zero(new_m - m);
    const std::uint64_t size = std::uint64_t{1} << std::min(align, fit);
    Block blk;
    blk.k_start = m + 1;
    blk.k_end = m + size;
    blk.value = mat_product_range(blk.k_start, blk.k_end, threads);
    blocks.push_back(std::move(blk));
    m += size;
    while (blocks.size() >= 2) {
      auto& hi = blocks[blocks.size() - 2];
      auto& lo = blocks.back();
      if (hi.k_end - hi.k_start != lo.k_end - lo.k_start) break;
      combine_inplace(hi.value, lo.value);
      hi.k_end = lo.k_end;
      blocks.pop_back();
    }
  }
}

MatPair Checkpoint::fold_mod(const mpz_class& modulus, int threads) const {
  validate();
  std::vector<MatPair> reduced(blocks.size());
  parallel_for(blocks.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) reduced[i] = reduce(blocks[i].value, modulus);
  });
  MatPair acc = reduce(mat_identity(), modulus);
  for (const auto& part : reduced) combine_mod_inplace(acc, part, modulus);
  return acc;
}

void save_checkpoint(const std::filesystem::path& file, const Checkpoint& ck) {
  ck.validate();
  if (ck.blocks.size() > std::numeric_limits<std::uint32_t>::max())
    throw CheckpointError("checkpoint: too many blocks");
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("checkpoint: cannot open for writing: " + file.string());
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u64(out, ck.m);
  put_u32(out, static_cast<std::uint32_t>(ck.blocks.size()));
  for (const auto& blk : ck.blocks) {
    put_u64(out, blk.k_start);
    put_u64(out, blk.k_end);
    put_mpz(out, blk.value.a);
    put_mpz(out, blk.value.b);
  }
  out.flush();
  if (!out) throw CheckpointError("checkpoint: write failed: " + file.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint: cannot open: " + file.string());
  const std::uint64_t file_size = std::filesystem::file_size(file);
  char magic[4];
  if (!in.read(magic, 4)) throw CheckpointError("checkpoint: truncated file");
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw CheckpointError("checkpoint: bad magic");
  if (get_u32(in) != kVersion) throw CheckpointError("checkpoint: unsupported version");
  Checkpoint ck;
  ck.m = get_u64(in);
  const std::uint32_t count = get_u32(in);
  ck.blocks.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Checkpoint::Block blk;
    blk.k_start = get_u64(in);
    blk.k_end = get_u64(in);
    blk.value.a = get_mpz(in, file_size);
    blk.value.b = get_mpz(in, file_size);
    ck.blocks.push_back(std::move(blk));
  }
  ck.validate();
  // Trailing garbage means the file is not what we wrote.
  if (in.peek() != std::char_traits<char>::eof())
    throw CheckpointError("checkpoint: trailing bytes");
  return ck;
}

CheckpointStore::CheckpointStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  const auto lock_path = dir_ / "lock";
  lock_fd_ = ::open(lock_path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
  if (lock_fd_ < 0)
    throw CheckpointError("checkpoint store: cannot open lock file: " + lock_path.string());
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    throw CheckpointError("checkpoint store: already locked by another scan: " + dir_.string());
  }
}

CheckpointStore::~CheckpointStore() {
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
  }
}

std::optional<Checkpoint> CheckpointStore::load() const {
  const auto file = dir_ / "checkpoint.lfck";
  if (!std::filesystem::exists(file)) return std::nullopt;
  return load_checkpoint(file);
}

void CheckpointStore::save(const Checkpoint& ck) const {
  const auto file = dir_ / "checkpoint.lfck";
  const auto tmp = dir_ / "checkpoint.lfck.tmp";
  save_checkpoint(tmp, ck);
  std::filesystem::rename(tmp, file);
}

}  // namespace lfres
