/**
 * Entry point: read the annotator id from the query string (asking for one
 * when absent) and boot the controller against the same-origin API.
 */

import { createApiClient } from './api.js';
import { AnnotatorApp } from './controller.js';

function signInForm(root: HTMLElement): void {
  const input = document.createElement('input');
  input.type = 'text';
  input.placeholder = 'annotator id (letters, digits, - _ .)';
  input.className = 'signin-input';
  const button = document.createElement('button');
  button.textContent = 'start annotating';
  const form = document.createElement('form');
  form.className = 'signin';
  const heading = document.createElement('h1');
  heading.textContent = 'tagpag';
  const hint = document.createElement('p');
  hint.textContent = 'Pick an annotator id; your work is stored under this name.';
  form.append(heading, hint, input, button);
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const id = input.value.trim();
    if (!id) return;
    const params = new URLSearchParams(window.location.search);
    params.set('annotator', id);
    window.location.search = params.toString();
  });
  root.replaceChildren(form);
  input.focus();
}

function boot(): void {
  const root = document.getElementById('app');
  if (!root) return;
  const annotator = new URLSearchParams(window.location.search).get('annotator');
  if (!annotator) {
    signInForm(root);
    return;
  }
  const app = new AnnotatorApp(root, createApiClient(), annotator);
  void app.start().catch((error) => {
    root.textContent = `Failed to start: ${error instanceof Error ? error.message : error}`;
  });
}

boot();
