#pragma once

#include <sepmetric/classifier.hpp>
#include <sepmetric/dataset.hpp>
#include <sepmetric/embedding.hpp>
#include <sepmetric/error.hpp>
#include <sepmetric/gaussian_model.hpp>
#include <sepmetric/pca.hpp>
#include <sepmetric/report.hpp>
#include <sepmetric/rng.hpp>
#include <sepmetric/separability.hpp>
#include <sepmetric/svg.hpp>
#include <sepmetric/synth.hpp>
#include <sepmetric/tsne.hpp>
