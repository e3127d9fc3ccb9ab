#pragma once

#include <string>
#include <vector>

#include "qgcam/cam/heatmap.hpp"
#include "qgcam/cnn/tensor.hpp"
#include "qgcam/io/image.hpp"

namespace qgcam::cam {

struct OverlayPaths {
    std::string heatmap_pgm;
    std::string overlay_png;
};

// File names follow <input-stem>.class<cls>.heatmap.pgm / .overlay.png.
inline OverlayPaths overlay_paths(const std::string& stem, int cls) {
    const std::string base = stem + ".class" + std::to_string(cls);
    return {base + ".heatmap.pgm", base + ".overlay.png"};
}

// Writes the normalized heat as a grayscale PGM and the heat colormap at 50%
// alpha over the (grayscale) input as an RGB PNG. Byte output is a pure
// function of the inputs.
inline void export_overlay(const cnn::FeatureTensor& image,
                           const std::vector<double>& heat,
                           const OverlayPaths& paths) {
    if (image.channels != 1)
        throw std::invalid_argument("export_overlay: grayscale input expected");
    if (heat.size() != static_cast<std::size_t>(image.height) * image.width)
        throw std::invalid_argument("export_overlay: heat size mismatch");

    std::vector<std::uint8_t> heat_px(heat.size());
    for (std::size_t i = 0; i < heat.size(); ++i) heat_px[i] = io::quantize(heat[i]);
    io::write_pgm(paths.heatmap_pgm, image.height, image.width, heat_px);

    std::vector<std::uint8_t> base_px(heat.size());
    for (std::size_t i = 0; i < heat.size(); ++i) base_px[i] = io::quantize(image.v[i]);
    io::write_png(paths.overlay_png, image.height, image.width,
                  io::overlay_rgb(base_px, heat));
}

}  // namespace qgcam::cam
