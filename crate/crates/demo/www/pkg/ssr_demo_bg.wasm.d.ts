/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const groups: () => [number, number];
export const spin_sweep: (a: number, b: number) => [number, number];
export const triality: (a: number, b: number, c: bigint) => [number, number];
export const twirl_heatmap: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
