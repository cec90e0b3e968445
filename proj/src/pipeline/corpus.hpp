// SPDX-License-Identifier: Apache-2.0

#ifndef QUADSIM_PIPELINE_CORPUS_HPP
#define QUADSIM_PIPELINE_CORPUS_HPP

#include <string>
#include <vector>

#include "core/image.hpp"

namespace quadsim {

// The built-in evaluation corpus: eight procedurally generated images
// (gradients, noise, checkerboards, AR(2) natural-statistics fields).
// Deterministic for a given seed; the repo ships the seed-1 renders as PPM.
std::vector<std::string> corpus_image_names();
ImagePlane make_corpus_image(const std::string& name, std::uint64_t seed);

}  // namespace quadsim

#endif
