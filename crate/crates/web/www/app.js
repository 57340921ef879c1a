// Wireframe viewer for meshes computed by the dupin-web module.
import init, { surface_mesh, orbit_mesh, fig7_mesh } from "./pkg/dupin_web.js";

const canvas = document.getElementById("view");
const ctx = canvas.getContext("2d");
const report = document.getElementById("report");
const form = document.getElementById("controls");

let mesh = null;
let yaw = 0.6, pitch = 0.4;

function value(id) {
  return Number(document.getElementById(id).value);
}

function compute() {
  const op = form.elements.op.value;
  const n = value("n");
  let json;
  try {
    if (op === "surface") {
      json = surface_mesh(document.getElementById("kind").value, value("param"), n);
    } else if (op === "orbit") {
      json = orbit_mesh(value("c"), n);
    } else {
      json = fig7_mesh(value("t"), n);
    }
  } catch (e) {
    mesh = null;
    report.className = "fail";
    report.textContent = String(e.message || e);
    draw();
    return;
  }
  mesh = JSON.parse(json);
  fit(mesh);
  showReport(mesh);
  draw();
}

// center and scale so the bounding sphere fills the canvas
function fit(m) {
  const c = [0, 0, 0];
  for (const v of m.vertices) for (let i = 0; i < 3; i++) c[i] += v[i] / m.vertices.length;
  let r = 1e-9;
  for (const v of m.vertices) r = Math.max(r, Math.hypot(v[0] - c[0], v[1] - c[1], v[2] - c[2]));
  m.center = c;
  m.radius = r;
}

function showReport(m) {
  const r = m.report;
  const lines = [`${m.name}: ${m.vertices.length} vertices, ${m.faces.length} faces, ${m.flagged} flagged`, ""];
  for (const c of r.checks) lines.push(`${c.pass ? "PASS" : "FAIL"} ${c.name} = ${c.value.toPrecision(6)}`);
  for (const w of r.warnings) lines.push(`warning: ${w}`);
  if (r.details && r.details.regime) lines.push("", `regime: ${r.details.regime}`);
  report.className = r.passed ? "" : "fail";
  report.textContent = lines.join("\n");
}

function project(v) {
  const x = (v[0] - mesh.center[0]) / mesh.radius;
  const y = (v[1] - mesh.center[1]) / mesh.radius;
  const z = (v[2] - mesh.center[2]) / mesh.radius;
  const cy = Math.cos(yaw), sy = Math.sin(yaw), cp = Math.cos(pitch), sp = Math.sin(pitch);
  const x1 = cy * x + sy * y, y1 = -sy * x + cy * y;
  const y2 = cp * y1 - sp * z, z2 = sp * y1 + cp * z;
  const s = canvas.width * 0.42;
  return [canvas.width / 2 + s * x1, canvas.height / 2 - s * z2, y2];
}

function draw() {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!mesh) return;
  const p = mesh.vertices.map(project);
  // back to front, shaded by depth
  const faces = mesh.faces.map((f) => [f, (p[f[0]][2] + p[f[1]][2] + p[f[2]][2] + p[f[3]][2]) / 4]);
  faces.sort((a, b) => b[1] - a[1]);
  ctx.lineWidth = 0.6;
  for (const [f, depth] of faces) {
    const shade = Math.round(120 + 80 * Math.max(-1, Math.min(1, depth)));
    ctx.strokeStyle = `rgb(${shade}, ${shade}, 255)`;
    ctx.beginPath();
    ctx.moveTo(p[f[0]][0], p[f[0]][1]);
    for (let k = 1; k <= 4; k++) ctx.lineTo(p[f[k % 4]][0], p[f[k % 4]][1]);
    ctx.stroke();
  }
}

let drag = null;
canvas.addEventListener("pointerdown", (e) => {
  drag = [e.clientX, e.clientY];
  canvas.setPointerCapture(e.pointerId);
});
canvas.addEventListener("pointermove", (e) => {
  if (!drag) return;
  yaw += (e.clientX - drag[0]) * 0.01;
  pitch = Math.max(-1.5, Math.min(1.5, pitch + (e.clientY - drag[1]) * 0.01));
  drag = [e.clientX, e.clientY];
  draw();
});
canvas.addEventListener("pointerup", () => (drag = null));

form.addEventListener("submit", (e) => {
  e.preventDefault();
  compute();
});

await init();
compute();
