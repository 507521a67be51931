/*
 * Copyright 2026 The Stratlift Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef STRATLIFT_TESTS_TEST_UTIL_H_
#define STRATLIFT_TESTS_TEST_UTIL_H_

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "stratlift/data.h"

namespace stratlift::testing {

// Builds a dataset from (z, y) pairs with ids c1, c2, ...
inline ExperimentDataset make_data(const std::vector<std::pair<int, double>>& zy) {
  std::vector<ExperimentRecord> recs;
  for (std::size_t i = 0; i < zy.size(); ++i) {
    ExperimentRecord r;
    r.customer_id = "c" + std::to_string(i + 1);
    r.z = zy[i].first;
    r.y = zy[i].second;
    recs.push_back(r);
  }
  return ExperimentDataset::create(std::move(recs));
}

// Removes the file when it goes out of scope.
class TempFile {
 public:
  explicit TempFile(const std::string& stem) {
    path_ = (std::filesystem::temp_directory_path() /
             ("stratlift_" + stem + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter()++)))
                .string();
  }
  TempFile(const std::string& stem, const std::string& contents) : TempFile(stem) {
    std::ofstream(path_) << contents;
  }
  ~TempFile() { std::remove(path_.c_str()); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }
  std::string read() const {
    std::ifstream in(path_);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string path_;
};

}  // namespace stratlift::testing

#endif  // STRATLIFT_TESTS_TEST_UTIL_H_
