#include "emomusic/window_dataset.hpp"

#include <algorithm>
#include <map>

namespace emomusic {

std::vector<std::string> WindowDataset::subjects() const {
  std::vector<std::string> out;
  for (const auto& w : windows)
    if (std::find(out.begin(), out.end(), w.subject_id) == out.end()) out.push_back(w.subject_id);
  return out;
}

std::vector<std::size_t> WindowDataset::subject_index() const {
  std::map<std::string, std::size_t> index;
  std::vector<std::size_t> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    auto [it, inserted] = index.try_emplace(w.subject_id, index.size());
    out.push_back(it->second);
  }
  return out;
}

}  // namespace emomusic
