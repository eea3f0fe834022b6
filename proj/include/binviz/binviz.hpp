// binviz - binary-to-image conversion and noise augmentation pipeline

#pragma once

#include <binviz/augmentation.hpp>
#include <binviz/corpus.hpp>
#include <binviz/entropy.hpp>
#include <binviz/error.hpp>
#include <binviz/image.hpp>
#include <binviz/imaging.hpp>
#include <binviz/manifest.hpp>
#include <binviz/metrics.hpp>
#include <binviz/noise.hpp>
#include <binviz/parallel.hpp>
#include <binviz/pipeline.hpp>
#include <binviz/png_io.hpp>
#include <binviz/split.hpp>
