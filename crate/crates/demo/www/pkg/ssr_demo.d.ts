/* tslint:disable */
/* eslint-disable */

/**
 * Catalog group names for the page's selectors.
 */
export function groups(): string;

/**
 * `W`, `W_U` and `A_U` of `cos(θ/2)|1⟩ + e^{iφ} sin(θ/2)|−1⟩` for `steps + 1`
 * values of θ in `[0, π]`.
 */
export function spin_sweep(steps: number, phi: number): string;

/**
 * Terms of `W_G = W_GxG-L + E_GxG + A_sh` on a random globally symmetric
 * pure state of the named group.
 */
export function triality(group: string, seed: bigint): string;

/**
 * Entry magnitudes of a random state before and after the chosen twirl.
 * `rep` follows the CLI syntax (`regular`, `0,2` or `a/b`); `kind` is
 * `global`, `local`, `left` or `right`.
 */
export function twirl_heatmap(group: string, rep: string, kind: string, seed: bigint): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly groups: () => [number, number];
    readonly spin_sweep: (a: number, b: number) => [number, number];
    readonly triality: (a: number, b: number, c: bigint) => [number, number];
    readonly twirl_heatmap: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
