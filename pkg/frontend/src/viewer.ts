/**
 * Three.js viewport: the scan surface rendered semi-transparent with the
 * candidate retopo overlaid and the crease edge-loop highlighted as a
 * polyline.
 */

import * as THREE from "three";
import { OrbitControls } from "three/examples/jsm/controls/OrbitControls.js";

import type { MeshPayload, TopologyPayload } from "./api.js";

function toGeometry(payload: MeshPayload): THREE.BufferGeometry {
  const geometry = new THREE.BufferGeometry();
  const positions = new Float32Array(payload.vertices.length * 3);
  payload.vertices.forEach((v, i) => {
    positions[3 * i] = v[0] ?? 0;
    positions[3 * i + 1] = v[1] ?? 0;
    positions[3 * i + 2] = v[2] ?? 0;
  });
  geometry.setAttribute("position", new THREE.BufferAttribute(positions, 3));
  geometry.setIndex(payload.faces.flat());
  geometry.computeVertexNormals();
  return geometry;
}

export class Viewer {
  private readonly scene = new THREE.Scene();
  private readonly camera: THREE.PerspectiveCamera;
  private readonly renderer: THREE.WebGLRenderer;
  private readonly controls: OrbitControls;
  private scanMesh: THREE.Mesh | null = null;
  private overlayMesh: THREE.Mesh | null = null;
  private creaseLine: THREE.Line | null = null;
  private creaseLoop: number[] = [];

  constructor(container: HTMLElement) {
    this.camera = new THREE.PerspectiveCamera(40, 1, 0.01, 100);
    this.camera.position.set(0, 0.6, 4.2);
    this.renderer = new THREE.WebGLRenderer({ antialias: true });
    this.renderer.setClearColor(0x14161a);
    container.appendChild(this.renderer.domElement);
    this.controls = new OrbitControls(this.camera, this.renderer.domElement);
    this.controls.target.set(0, 0.5, 0);

    this.scene.add(new THREE.AmbientLight(0xffffff, 0.55));
    const key = new THREE.DirectionalLight(0xffffff, 1.1);
    key.position.set(1.5, 2.0, 3.0);
    this.scene.add(key);

    const resize = () => {
      const w = container.clientWidth || 640;
      const h = container.clientHeight || 480;
      this.camera.aspect = w / h;
      this.camera.updateProjectionMatrix();
      this.renderer.setSize(w, h);
    };
    resize();
    new ResizeObserver(resize).observe(container);

    this.renderer.setAnimationLoop(() => {
      this.controls.update();
      this.renderer.render(this.scene, this.camera);
    });
  }

  setTopology(topology: TopologyPayload): void {
    this.creaseLoop = topology.crease_loop;
  }

  /** Reference scan surface, drawn semi-transparent beneath the overlay. */
  setScanMesh(payload: MeshPayload): void {
    if (this.scanMesh) {
      this.scene.remove(this.scanMesh);
      this.scanMesh.geometry.dispose();
    }
    const material = new THREE.MeshStandardMaterial({
      color: 0x8a93a6,
      transparent: true,
      opacity: 0.35,
      side: THREE.DoubleSide,
      depthWrite: false,
    });
    this.scanMesh = new THREE.Mesh(toGeometry(payload), material);
    this.scene.add(this.scanMesh);
  }

  /** Candidate retopo overlay plus the highlighted crease polyline. */
  setOverlayMesh(payload: MeshPayload): void {
    if (this.overlayMesh) {
      this.scene.remove(this.overlayMesh);
      this.overlayMesh.geometry.dispose();
    }
    if (this.creaseLine) {
      this.scene.remove(this.creaseLine);
      this.creaseLine.geometry.dispose();
    }
    const material = new THREE.MeshStandardMaterial({
      color: 0xd9a066,
      side: THREE.DoubleSide,
      flatShading: true,
    });
    this.overlayMesh = new THREE.Mesh(toGeometry(payload), material);
    this.scene.add(this.overlayMesh);

    if (this.creaseLoop.length >= 2) {
      const points = this.creaseLoop.map((v) => {
        const p = payload.vertices[v] ?? [0, 0, 0];
        return new THREE.Vector3(p[0], p[1], (p[2] ?? 0) + 0.002);
      });
      const geometry = new THREE.BufferGeometry().setFromPoints(points);
      this.creaseLine = new THREE.Line(geometry, new THREE.LineBasicMaterial({ color: 0x3ee6e0 }));
      this.scene.add(this.creaseLine);
    }
  }
}
