import init, { rankOneCompletion, walkrankSearch, boundCurves } from "./pkg/rankfill_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function report(id, text, failed = false) {
  const el = $(id);
  el.textContent = text;
  el.className = failed ? "out err" : "out";
}

// value in [-1, 1] to a blue-white-red colour
function shade(v) {
  const t = Math.max(-1, Math.min(1, v));
  const c = Math.round(255 * (1 - Math.abs(t)));
  return t >= 0 ? `rgb(255,${c},${c})` : `rgb(${c},${c},255)`;
}

function heatmap(ctx, x0, y0, size, n, values, mask) {
  const cell = size / n;
  for (let i = 0; i < n; i++) {
    for (let a = 0; a < n; a++) {
      const k = i * n + a;
      ctx.fillStyle = shade(values[k]);
      ctx.fillRect(x0 + a * cell, y0 + i * cell, Math.ceil(cell), Math.ceil(cell));
      if (mask && mask[k]) {
        ctx.fillStyle = "#000";
        ctx.fillRect(x0 + a * cell + cell / 3, y0 + i * cell + cell / 3, Math.max(1, cell / 3), Math.max(1, cell / 3));
      }
    }
  }
}

function runCompletion() {
  try {
    const c = rankOneCompletion(num("c-n"), num("c-eps"), num("c-seed"));
    const ctx = $("c-canvas").getContext("2d");
    ctx.clearRect(0, 0, 820, 400);
    heatmap(ctx, 0, 0, 400, c.n, c.truth(), c.revealed());
    heatmap(ctx, 420, 0, 400, c.n, c.estimate(), null);
    report("c-out",
      `left: truth with revealed entries dotted   right: completion (white = not determined)\n` +
      `determined ${(100 * c.determined).toFixed(1)}%   rmse ${c.rmse.toFixed(4)}   ` +
      `large-n prediction sqrt(1 - xi zeta) = ${c.predicted.toFixed(4)}`);
    c.free();
  } catch (e) {
    report("c-out", String(e), true);
  }
}

function axes(ctx, w, h, xmax, ymax) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(40, 10);
  ctx.lineTo(40, h - 25);
  ctx.lineTo(w - 10, h - 25);
  ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.fillText(ymax.toPrecision(3), 2, 14);
  ctx.fillText("0", 28, h - 25);
  ctx.fillText(xmax.toPrecision(3), w - 50, h - 10);
  return {
    x: (v) => 40 + (v / xmax) * (w - 50),
    y: (v) => h - 25 - (v / ymax) * (h - 35),
  };
}

function line(ctx, map, xs, ys, colour) {
  ctx.strokeStyle = colour;
  ctx.beginPath();
  xs.forEach((x, k) => (k ? ctx.lineTo(map.x(x), map.y(ys[k])) : ctx.moveTo(map.x(x), map.y(ys[k]))));
  ctx.stroke();
}

function runSearch() {
  try {
    const t = walkrankSearch(num("w-n"), num("w-r"), num("w-eps"), num("w-seed"), num("w-steps"));
    const steps = t.steps(), costs = t.costs();
    const ctx = $("w-canvas").getContext("2d");
    const map = axes(ctx, 820, 260, Math.max(1, steps[steps.length - 1]), Math.max(1, ...costs));
    line(ctx, map, steps, costs, "#c33");
    report("w-out",
      `violated entries vs step   revealed ${t.revealed}   final cost ${t.finalCost}   rmse ${t.rmse.toFixed(4)}`);
    t.free();
  } catch (e) {
    report("w-out", String(e), true);
  }
}

function runBounds() {
  try {
    const r = num("b-r");
    const b = boundCurves(r, num("b-max"), 60);
    const eps = b.epsilon();
    const ctx = $("b-canvas").getContext("2d");
    const map = axes(ctx, 820, 260, eps[eps.length - 1], 2 * r);
    line(ctx, map, eps, b.theorem1(), "#888");
    line(ctx, map, eps, b.discrete(), "#c33");
    line(ctx, map, eps, b.lower(), "#33c");
    report("b-out", "grey: closed-form upper bound   red: finite-alphabet upper bound   blue: lower bound");
    b.free();
  } catch (e) {
    report("b-out", String(e), true);
  }
}

await init();
$("c-eps").addEventListener("input", () => ($("c-eps-v").textContent = $("c-eps").value));
$("c-run").addEventListener("click", runCompletion);
$("w-run").addEventListener("click", runSearch);
$("b-run").addEventListener("click", runBounds);
runCompletion();
runBounds();
