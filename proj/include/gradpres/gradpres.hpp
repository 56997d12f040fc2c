#pragma once

#include "dataset.hpp"
#include "error.hpp"
#include "feature_io.hpp"
#include "gdm.hpp"
#include "generator.hpp"
#include "grid.hpp"
#include "hog.hpp"
#include "image.hpp"
#include "image_io.hpp"
#include "json.hpp"
#include "parallel.hpp"
#include "parity.hpp"
#include "svm.hpp"
#include "synth.hpp"
#include "visualize.hpp"
