/* tslint:disable */
/* eslint-disable */

export class DemoModel {
    free(): void;
    [Symbol.dispose](): void;
    constructor(n: number, seed: number, epochs: number);
    search(query: string, top_k: number, use_graph: boolean): string;
    summary(): string;
}

export function extract(source: string): string;

export function subtokens(text: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demomodel_free: (a: number, b: number) => void;
    readonly demomodel_new: (a: number, b: number, c: number) => [number, number, number];
    readonly demomodel_search: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly demomodel_summary: (a: number) => [number, number];
    readonly extract: (a: number, b: number) => [number, number, number, number];
    readonly subtokens: (a: number, b: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
