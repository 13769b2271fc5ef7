#pragma once

#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "foga/core/errors.hpp"
#include "foga/datapipe/image.hpp"

namespace foga {

/// Decode PNG/JPEG/TIFF/BMP from disk. Color images come back as RGB.
inline ImageU8 load_image(const std::string& path) {
    cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED);
    if (m.empty()) throw data_error("cannot decode image: " + path);
    if (m.depth() != CV_8U) {
        cv::Mat tmp;
        double scale = 1.0;
        if (m.depth() == CV_16U) scale = 1.0 / 257.0;
        m.convertTo(tmp, CV_8U, scale);
        m = tmp;
    }
    ImageU8 img;
    img.h = m.rows;
    img.w = m.cols;
    if (m.channels() == 1) {
        img.channels = 1;
        img.data.assign(m.datastart, m.datastart + static_cast<std::size_t>(m.rows) * m.cols);
        if (!m.isContinuous()) {
            img.data.resize(static_cast<std::size_t>(m.rows) * m.cols);
            for (int y = 0; y < m.rows; ++y)
                std::copy(m.ptr<std::uint8_t>(y), m.ptr<std::uint8_t>(y) + m.cols,
                          img.data.begin() + static_cast<std::size_t>(y) * m.cols);
        }
    } else if (m.channels() == 3 || m.channels() == 4) {
        img.channels = 3;
        img.data.resize(static_cast<std::size_t>(m.rows) * m.cols * 3);
        const int ch = m.channels();
        for (int y = 0; y < m.rows; ++y) {
            const std::uint8_t* row = m.ptr<std::uint8_t>(y);
            for (int x = 0; x < m.cols; ++x) {
                // OpenCV stores BGR(A); expose RGB.
                img.at(y, x, 0) = row[x * ch + 2];
                img.at(y, x, 1) = row[x * ch + 1];
                img.at(y, x, 2) = row[x * ch + 0];
            }
        }
    } else {
        throw data_error("unsupported channel count in " + path);
    }
    return img;
}

inline void save_image_png(const std::string& path, const ImageU8& img) {
    cv::Mat m;
    if (img.channels == 1) {
        m = cv::Mat(img.h, img.w, CV_8UC1);
        for (int y = 0; y < img.h; ++y)
            std::copy(img.data.begin() + static_cast<std::size_t>(y) * img.w,
                      img.data.begin() + static_cast<std::size_t>(y + 1) * img.w,
                      m.ptr<std::uint8_t>(y));
    } else {
        m = cv::Mat(img.h, img.w, CV_8UC3);
        for (int y = 0; y < img.h; ++y) {
            std::uint8_t* row = m.ptr<std::uint8_t>(y);
            for (int x = 0; x < img.w; ++x) {
                row[x * 3 + 0] = img.at(y, x, 2);
                row[x * 3 + 1] = img.at(y, x, 1);
                row[x * 3 + 2] = img.at(y, x, 0);
            }
        }
    }
    if (!cv::imwrite(path, m)) throw runtime_failure("cannot write image: " + path);
}

}  // namespace foga
