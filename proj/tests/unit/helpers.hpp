#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <doctest.h>

#include "emomusic/dataset.hpp"
#include "emomusic/error.hpp"
#include "oracles/signals.hpp"

namespace test {

namespace fs = std::filesystem;

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("emomusic_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

using signals::sine;
using signals::silence;
using signals::click_train;

template <class Fn>
emomusic::ErrorKind error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const emomusic::Error& e) {
    return e.kind();
  }
  FAIL("expected an emomusic::Error");
  return emomusic::ErrorKind::Io;
}

}  // namespace test
