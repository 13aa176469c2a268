/**
 * @file lfres/checkpoint.hpp
 * @copyright Apache License 2.0
 *
 * Cross-interval reuse of the prefix product C_1 ... C_m: the frontier is a
 * binary-counter list of unreduced dyadic block products covering [1, m],
 * so the next interval extends it instead of starting over.
 */
#ifndef LFRES_CHECKPOINT_HPP
#define LFRES_CHECKPOINT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lfres/matpair.hpp"

namespace lfres {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  struct Block {
    std::uint64_t k_start = 0;
    std::uint64_t k_end = 0;
    MatPair value;  // C_{k_start} ... C_{k_end}, unreduced

    bool operator==(const Block&) const = default;
  };

  std::uint64_t m = 0;          // frontier covers [1, m]
  std::vector<Block> blocks;    // contiguous, ascending

  bool operator==(const Checkpoint&) const = default;

  // Throws CheckpointError unless blocks tile [1, m] contiguously.
  void validate() const;

  // Multiplies C_{m+1} ... C_{new_m} into the frontier, pushing
  // power-of-two aligned blocks and merging equal-sized neighbours like a
  // binary counter. No-op when new_m == m; rejects new_m < m.
  void extend_to(std::uint64_t new_m, int threads = 1);

  // M_m mod modulus: every block reduced, then folded in ascending order.
  MatPair fold_mod(const mpz_class& modulus, int threads = 1) const;
};

// Binary file round-trip. Layout: magic "LFCK", version u32, m u64, block
// count u32, then per block k_start u64, k_end u64 and each entry as a u64
// byte length followed by big-endian magnitude bytes. All fixed-width
// integers little-endian.
void save_checkpoint(const std::filesystem::path& file, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::filesystem::path& file);

// Directory holding one checkpoint file, guarded by an advisory lock so a
// single scan owns it at a time.
class CheckpointStore {
 public:
  explicit CheckpointStore(std::filesystem::path dir);
  ~CheckpointStore();
  CheckpointStore(const CheckpointStore&) = delete;
  CheckpointStore& operator=(const CheckpointStore&) = delete;

  std::optional<Checkpoint> load() const;
  void save(const Checkpoint& ck) const;  // write-to-temp then rename

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  int lock_fd_ = -1;
};

}  // namespace lfres

#endif  // LFRES_CHECKPOINT_HPP
