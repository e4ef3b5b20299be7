import { HttpApi } from './api.js';
import { Game, localStorageTokenStore } from './state.js';
import { render } from './ui.js';

const root = document.getElementById('app');
if (!root) throw new Error('missing #app mount point');

const game = new Game(new HttpApi(''), localStorageTokenStore());
game.onChange(() => render(game, root));
void game.start();
