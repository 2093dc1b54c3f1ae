/** Camera raster handling: base64 RGB8 bytes onto a canvas. */

import { CameraFrameData } from "./state.js";

export function decodePixels(b64: string): Uint8ClampedArray {
  const raw = atob(b64);
  const out = new Uint8ClampedArray(raw.length);
  for (let i = 0; i < raw.length; i++) {
    out[i] = raw.charCodeAt(i);
  }
  return out;
}

/** RGB8 -> RGBA for ImageData. */
export function toRgba(frame: CameraFrameData): Uint8ClampedArray<ArrayBuffer> {
  const rgb = decodePixels(frame.pixels_b64);
  const n = frame.width * frame.height;
  const rgba = new Uint8ClampedArray(new ArrayBuffer(n * 4));
  for (let i = 0; i < n; i++) {
    rgba[i * 4] = rgb[i * 3];
    rgba[i * 4 + 1] = rgb[i * 3 + 1];
    rgba[i * 4 + 2] = rgb[i * 3 + 2];
    rgba[i * 4 + 3] = 255;
  }
  return rgba;
}

export function drawFrame(
  canvas: HTMLCanvasElement,
  frame: CameraFrameData,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const image = new ImageData(toRgba(frame), frame.width, frame.height);
  // paint at native size on a backing canvas, then scale up smoothly-off
  const backing = document.createElement("canvas");
  backing.width = frame.width;
  backing.height = frame.height;
  backing.getContext("2d")?.putImageData(image, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.drawImage(backing, 0, 0, canvas.width, canvas.height);
}
