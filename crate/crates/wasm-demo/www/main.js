import init, { render, land, classify } from "./pkg/cosine_puzzle_wasm.js";

const $ = (id) => document.getElementById(id);
const canvas = $("view");
const ctx = canvas.getContext("2d");
const out = $("out");

let view = null;
let rays = [];

const params = () => ["u_re", "u_im", "v_re", "v_im"].map((k) => Number($(k).value));

function resetView() {
  const [ur, ui] = params();
  view = { cx: ur, cy: ui, width: 8 };
}

function toPixel(re, im) {
  const s = canvas.width / view.width;
  return [canvas.width / 2 + (re - view.cx) * s, canvas.height / 2 - (im - view.cy) * s];
}

function draw() {
  if (!view) resetView();
  const [ur, ui, vr, vi] = params();
  try {
    const px = render(ur, ui, vr, vi, view.cx, view.cy, view.width,
      canvas.width, canvas.height, Number($("iter").value));
    ctx.putImageData(new ImageData(new Uint8ClampedArray(px), canvas.width, canvas.height), 0, 0);
  } catch (e) {
    out.textContent = `render failed: ${e}`;
    return;
  }
  ctx.lineWidth = 1.5;
  ctx.strokeStyle = "#e0207a";
  for (const pts of rays) {
    ctx.beginPath();
    for (let i = 0; i < pts.length; i += 2) {
      const [x, y] = toPixel(pts[i], pts[i + 1]);
      i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
    }
    ctx.stroke();
  }
}

canvas.addEventListener("click", (ev) => {
  const r = canvas.getBoundingClientRect();
  const s = view.width / canvas.width;
  view.cx += (ev.clientX - r.left - canvas.width / 2) * s;
  view.cy -= (ev.clientY - r.top - canvas.height / 2) * s;
  if (ev.shiftKey) view.width *= 2;
  draw();
});

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  view.width *= ev.deltaY > 0 ? 1.25 : 0.8;
  draw();
});

$("render").onclick = () => { rays = []; draw(); };
$("reset").onclick = () => { resetView(); draw(); };

$("land").onclick = () => {
  const [ur, ui, vr, vi] = params();
  try {
    const r = land(ur, ui, vr, vi, $("address").value);
    rays.push(r.points());
    out.textContent = r.landing_summary();
    r.free();
    draw();
  } catch (e) {
    out.textContent = `landing failed: ${e}`;
  }
};

$("classify").onclick = () => {
  const [ur, ui, vr, vi] = params();
  try {
    out.textContent = JSON.stringify(JSON.parse(classify(ur, ui, vr, vi)), null, 2);
  } catch (e) {
    out.textContent = `classification failed: ${e}`;
  }
};

await init();
resetView();
draw();
