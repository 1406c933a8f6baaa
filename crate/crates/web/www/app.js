import init, { explore_map, glv_collapse, sis_phase } from "./pkg/netcollapse_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function show(id, text, failed = false) {
  $(id).textContent = text;
  $(id).className = failed ? "err" : "";
}

function fmt(v) {
  return v === null || v === undefined ? "n/a" : Number(v).toPrecision(5);
}

// Plot-space transform for a canvas and data ranges.
function frame(canvas, [x0, x1], [y0, y1]) {
  const pad = 30;
  const w = canvas.width - 2 * pad;
  const h = canvas.height - 2 * pad;
  return {
    px: (x) => pad + ((x - x0) / (x1 - x0)) * w,
    py: (y) => pad + h - ((y - y0) / (y1 - y0)) * h,
  };
}

function polyline(ctx, pts, color, width = 1.5) {
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.beginPath();
  pts.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
  ctx.stroke();
}

function axes(ctx, f, xr, yr) {
  ctx.strokeStyle = "#bbb";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(f.px(xr[0]), f.py(0));
  ctx.lineTo(f.px(xr[1]), f.py(0));
  ctx.moveTo(f.px(0), f.py(yr[0]));
  ctx.lineTo(f.px(0), f.py(yr[1]));
  ctx.stroke();
  ctx.fillStyle = "#666";
  ctx.font = "11px sans-serif";
  ctx.fillText(`[${fmt(xr[0])}, ${fmt(xr[1])}]`, 4, 12);
}

function horner(d, x) {
  return d.reduceRight((acc, c) => acc * x + c, 0);
}

function drawCobweb(report) {
  const canvas = $("map-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const xs = [...report.orbit, ...report.roots.map((r) => r.x), 0, 1];
  let lo = Math.min(...xs);
  let hi = Math.max(...xs);
  const margin = 0.1 * (hi - lo || 1);
  lo -= margin;
  hi += margin;
  const f = frame(canvas, [lo, hi], [lo, hi]);
  axes(ctx, f, [lo, hi], [lo, hi]);
  polyline(ctx, [[f.px(lo), f.py(lo)], [f.px(hi), f.py(hi)]], "#999", 1);

  const curve = [];
  for (let i = 0; i <= 200; i++) {
    const x = lo + ((hi - lo) * i) / 200;
    curve.push([f.px(x), f.py(horner(report.d, x))]);
  }
  ctx.save();
  ctx.beginPath();
  ctx.rect(0, 0, canvas.width, canvas.height);
  ctx.clip();
  polyline(ctx, curve, "#1f5fa8", 2);

  const web = [];
  report.orbit.forEach((x, i) => {
    if (i + 1 >= report.orbit.length) return;
    const y = report.orbit[i + 1];
    web.push([f.px(x), f.py(i ? x : lo)], [f.px(x), f.py(y)], [f.px(y), f.py(y)]);
  });
  polyline(ctx, web, "#d2691e", 1);
  ctx.restore();

  for (const r of report.roots) {
    ctx.fillStyle = r.stable ? "#2a8a2a" : "#fff";
    ctx.strokeStyle = "#2a8a2a";
    ctx.beginPath();
    ctx.arc(f.px(r.x), f.py(r.x), 5, 0, 2 * Math.PI);
    ctx.fill();
    ctx.stroke();
  }
}

function drawSeries(canvasId, full, reduced) {
  const canvas = $(canvasId);
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const ys = [...full, ...reduced, 0];
  const hi = Math.max(...ys) * 1.1 || 1;
  const steps = Math.max(full.length, reduced.length) - 1;
  const f = frame(canvas, [0, steps], [0, hi]);
  axes(ctx, f, [0, steps], [0, hi]);
  polyline(ctx, full.map((y, t) => [f.px(t), f.py(y)]), "#1f5fa8", 2);
  polyline(ctx, reduced.map((y, t) => [f.px(t), f.py(y)]), "#d2691e", 1.5);
  ctx.fillStyle = "#1f5fa8";
  ctx.fillText("full system", canvas.width - 150, 16);
  ctx.fillStyle = "#d2691e";
  ctx.fillText("effective map", canvas.width - 150, 30);
}

function runMap() {
  try {
    const d = $("map-d").value.split(/[\s,]+/).filter(Boolean).map(Number);
    const report = JSON.parse(explore_map(new Float64Array(d), num("map-x0"), num("map-steps")));
    drawCobweb(report);
    const roots = report.roots
      .map((r) => `x* = ${fmt(r.x)}  slope ${fmt(r.multiplier)}  ${r.stable ? "stable" : "unstable"}`)
      .join("\n");
    const last = report.orbit[report.orbit.length - 1];
    show("map-out", `${roots || "no real fixed points"}\norbit ends at ${fmt(last)} after ${report.orbit.length - 1} steps`);
  } catch (e) {
    show("map-out", String(e), true);
  }
}

function runGlv() {
  try {
    const r = JSON.parse(
      glv_collapse(num("glv-s"), num("glv-alpha"), num("glv-x"), num("glv-c"), num("glv-d"), num("glv-seed")),
    );
    drawSeries("glv-canvas", r.full, r.reduced);
    show(
      "glv-out",
      `predicted: d2 = ${fmt(r.d2)}, d3 = ${fmt(r.d3)}, x_eff = ${fmt(r.pred_xeff)}, err = ${fmt(r.pred_err)}\n` +
        `simulated (${r.status}): x_eff = ${fmt(r.x_eff)}, err = ${fmt(r.err)}, d = [${r.sim_d.map(fmt).join(", ")}]`,
    );
  } catch (e) {
    show("glv-out", String(e), true);
  }
}

function runSis() {
  try {
    const r = JSON.parse(sis_phase(num("sis-n"), num("sis-p"), num("sis-e"), num("sis-w"), num("sis-seed")));
    drawSeries("sis-canvas", r.full, r.reduced);
    show(
      "sis-out",
      `A_eff = ${fmt(r.a_eff)}, e_eff = ${fmt(r.e_eff)}: predicted ${r.phase}, x_eff = ${fmt(r.pred_xeff)}\n` +
        `simulated (${r.status}): x_eff = ${fmt(r.x_eff)}, err = ${fmt(r.err)}`,
    );
  } catch (e) {
    show("sis-out", String(e), true);
  }
}

await init();
$("map-run").addEventListener("click", runMap);
$("glv-run").addEventListener("click", runGlv);
$("sis-run").addEventListener("click", runSis);
runMap();
runGlv();
runSis();
