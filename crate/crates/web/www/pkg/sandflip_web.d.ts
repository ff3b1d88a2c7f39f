/* tslint:disable */
/* eslint-disable */

/**
 * A ring evolving in time, sampled row by row for a space-time picture.
 */
export class SpaceTime {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Advances `rows` times by `dt`; returns the heights (1 or 2) after each
     * advance, row after row.
     */
    advance(rows: number, dt: number): Uint8Array;
    density(): number;
    constructor(n: number, model: string, alpha: number, param: number, rho0: number, seed: bigint);
    time(): number;
}

/**
 * Applies `op` (`"add"`, `"anti_add"` or `"flip"`) at site `x` of the
 * configuration `heights` (values 1 or 2) and returns the new heights.
 */
export function apply_operator(heights: Uint8Array, ring: boolean, op: string, x: number): Uint8Array;

/**
 * Measured density of height-1 sites and its prediction at `points` evenly
 * spaced times in `[0, t_end]`, flattened as `[t, measured, predicted, ...]`.
 */
export function density_curve(n: number, model: string, alpha: number, param: number, rho0: number, t_end: number, points: number, seed: bigint): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_spacetime_free: (a: number, b: number) => void;
    readonly apply_operator: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly density_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: bigint) => [number, number, number, number];
    readonly spacetime_advance: (a: number, b: number, c: number) => [number, number];
    readonly spacetime_density: (a: number) => number;
    readonly spacetime_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number];
    readonly spacetime_time: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
