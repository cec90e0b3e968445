// SPDX-License-Identifier: Apache-2.0
//
// Regenerates the checked-in evaluation corpus (data/corpus/*.ppm).
// The renders are deterministic for a given seed; the repo ships seed 1.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "core/image.hpp"
#include "pipeline/corpus.hpp"

int main(int argc, char** argv) {
  std::string out_dir = argc > 1 ? argv[1] : "data/corpus";
  std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
  for (const auto& name : quadsim::corpus_image_names()) {
    quadsim::ImagePlane img = quadsim::make_corpus_image(name, seed);
    std::string path = out_dir + "/" + name + ".ppm";
    quadsim::write_pnm(img, path);
    std::printf("%s  %dx%d\n", path.c_str(), img.width, img.height);
  }
  return 0;
}
